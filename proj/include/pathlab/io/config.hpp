#pragma once

// Run configuration: a YAML file, or the equivalent JSON document
//   {"experiment": "...", "seed": 7, "params": {...}}
// read through a key-tracking reader, so misspelled keys are reported instead
// of silently falling back to defaults.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "pathlab/core/error.hpp"
#include "pathlab/core/grid.hpp"
#include "pathlab/potentials.hpp"

namespace pathlab::io {

using json = nlohmann::json;

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"propagate",  "evolve", "diffuse", "huygens",
                                                "pairpaths",  "positivity", "born", "reflect1d"};
    return names;
}

/// 64-bit FNV-1a of the bytes.
inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream s;
    s << std::hex;
    s.width(16);
    s.fill('0');
    s << v;
    return s.str();
}

/// Typed access to one JSON object. Every key read is recorded; finish()
/// rejects the keys nobody asked for.
class Reader {
public:
    Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        require(j_.is_object(), where_ + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    double number(const std::string& key, double fallback) {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        require(j_.at(key).is_number(), where_ + "." + key + ": expected a number");
        return j_.at(key).get<double>();
    }
    double number(const std::string& key) {
        require(j_.contains(key), where_ + ": missing key '" + key + "'");
        return number(key, 0.0);
    }
    std::uint64_t count(const std::string& key, std::uint64_t fallback) {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        const auto& v = j_.at(key);
        require(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0),
                where_ + "." + key + ": expected a non-negative integer");
        return v.get<std::uint64_t>();
    }
    std::string text(const std::string& key, const std::string& fallback) {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        require(j_.at(key).is_string(), where_ + "." + key + ": expected a string");
        return j_.at(key).get<std::string>();
    }
    bool flag(const std::string& key, bool fallback) {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        require(j_.at(key).is_boolean(), where_ + "." + key + ": expected true or false");
        return j_.at(key).get<bool>();
    }
    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        const auto& a = j_.at(key);
        require(a.is_array(), where_ + "." + key + ": expected an array of numbers");
        std::vector<double> out;
        for (const auto& v : a) {
            require(v.is_number(), where_ + "." + key + ": expected an array of numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }
    /// Sub-object, or an empty object when absent.
    Reader child(const std::string& key) {
        seen_.insert(key);
        static const json empty = json::object();
        return Reader(j_.contains(key) ? j_.at(key) : empty, where_ + "." + key);
    }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            require(seen_.count(k) == 1, where_ + ": unknown key '" + k + "'");
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

inline Grid1D read_grid(Reader r, double lo, double hi, std::size_t n) {
    const double a = r.number("min", lo), b = r.number("max", hi);
    const auto points = r.count("points", n);
    r.finish();
    return Grid1D(a, b, static_cast<std::size_t>(points));
}

inline PhysicalParams read_physical(Reader r) {
    PhysicalParams p;
    p.mass = r.number("mass", 1.0);
    p.hbar = r.number("hbar", 1.0);
    r.finish();
    p.validate();
    return p;
}

/// {"type": "harmonic", "omega": 1.0} and so on; field names follow the
/// potential catalog.
inline PotentialSpec read_potential(Reader r, const std::string& fallback_type = "free") {
    const std::string type = r.text("type", fallback_type);
    PotentialSpec spec;
    if (type == "free") spec = potential::Free{};
    else if (type == "linear") spec = potential::Linear{r.number("force", 0.0)};
    else if (type == "harmonic") spec = potential::Harmonic{r.number("omega", 1.0)};
    else if (type == "quartic") spec = potential::Quartic{r.number("lambda4", 1.0)};
    else if (type == "gaussian_well") spec = potential::GaussianWell{r.number("depth", -1.0), r.number("sigma", 1.0)};
    else if (type == "yukawa") spec = potential::Yukawa{r.number("g", 1.0), r.number("mu", 1.0)};
    else if (type == "square_barrier")
        spec = potential::SquareBarrier{r.number("height", 1.0), r.number("half_width", 1.0)};
    else throw Error("unknown potential type '" + type + "'");
    r.finish();
    validate(spec);
    return spec;
}

inline json potential_json(const PotentialSpec& spec) {
    json j{{"type", potential_name(spec)}};
    std::visit(overloaded{[](const potential::Free&) {},
                          [&](const potential::Linear& p) { j["force"] = p.force; },
                          [&](const potential::Harmonic& p) { j["omega"] = p.omega; },
                          [&](const potential::Quartic& p) { j["lambda4"] = p.lambda4; },
                          [&](const potential::GaussianWell& p) {
                              j["depth"] = p.depth;
                              j["sigma"] = p.sigma;
                          },
                          [&](const potential::Yukawa& p) {
                              j["g"] = p.g;
                              j["mu"] = p.mu;
                          },
                          [&](const potential::SquareBarrier& p) {
                              j["height"] = p.height;
                              j["half_width"] = p.half_width;
                          }},
               spec);
    return j;
}

struct RunConfig {
    std::string experiment;
    std::uint64_t seed = 1;
    json params = json::object();
    std::filesystem::path out_dir = "out";
    /// 0 means PATHLAB_THREADS or the hardware count.
    int threads = 0;

    /// What the artifacts depend on: experiment, seed and parameters. The
    /// output directory and the thread count are deliberately left out.
    json canonical() const { return json{{"experiment", experiment}, {"seed", seed}, {"params", params}}; }
    std::string hash() const { return hex64(fnv1a(canonical().dump())); }
};

inline RunConfig parse_config(const json& doc) {
    Reader r(doc, "config");
    RunConfig c;
    c.experiment = r.text("experiment", "");
    require(!c.experiment.empty(), "config: missing key 'experiment'");
    bool known = false;
    for (const auto& e : experiment_names()) known = known || e == c.experiment;
    require(known, "config: unknown experiment '" + c.experiment + "'");
    c.seed = r.count("seed", 1);
    r.child("params");
    if (doc.contains("params")) c.params = doc.at("params");
    require(c.params.is_object(), "config.params: expected an object");
    r.finish();
    return c;
}

/// Plain YAML scalars become booleans, integers or doubles when they read as
/// one; quoted scalars always stay strings.
inline json yaml_to_json(const YAML::Node& node) {
    switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined: return nullptr;
    case YAML::NodeType::Sequence: {
        json a = json::array();
        for (const auto& item : node) a.push_back(yaml_to_json(item));
        return a;
    }
    case YAML::NodeType::Map: {
        json o = json::object();
        for (const auto& kv : node) o[kv.first.as<std::string>()] = yaml_to_json(kv.second);
        return o;
    }
    case YAML::NodeType::Scalar: break;
    }
    const std::string text = node.Scalar();
    if (node.Tag() == "!") return text;
    bool b;
    if (YAML::convert<bool>::decode(node, b)) return b;
    std::int64_t i;
    if (YAML::convert<std::int64_t>::decode(node, i)) return i;
    double d;
    if (YAML::convert<double>::decode(node, d)) return d;
    return text;
}

inline json parse_yaml(const std::string& text) {
    try {
        return yaml_to_json(YAML::Load(text));
    } catch (const YAML::Exception& e) {
        throw Error(std::string("yaml: ") + e.what());
    }
}

/// .yaml and .yml files are read as YAML, anything else as JSON.
inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    require(static_cast<bool>(f), "cannot open config " + path.string());
    const std::string text{std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
    const auto ext = path.extension().string();
    json doc;
    try {
        doc = (ext == ".yaml" || ext == ".yml") ? parse_yaml(text) : json::parse(text);
    } catch (const std::exception& e) {
        throw Error("config " + path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

} // namespace pathlab::io
