#include "rbcd/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "rbcd/errors.hpp"
#include "rbcd/pair_sampler.hpp"

namespace rbcd {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() ||
      !std::isfinite(v)) {
    throw ConfigError(what + ": expected a finite number, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(what + ": expected a non-negative integer, got '" +
                      text + "'");
  }
  return v;
}

bool parse_bool(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(what + ": expected true/false, got '" + text + "'");
}

}  // namespace

ValueRule ValueRule::parse(const std::string& text) {
  const std::string t = trim(text);
  const auto colon = t.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("value rule '" + text + "' must look like kind:args");
  }
  const std::string kind = t.substr(0, colon);
  const auto args = split(t.substr(colon + 1), ',');
  ValueRule rule;
  if (kind == "constant") {
    if (args.size() != 1) throw ConfigError("constant takes one value");
    rule.kind = Kind::constant;
    rule.first = parse_double(args[0], "constant");
  } else if (kind == "geometric") {
    if (args.size() != 2) throw ConfigError("geometric takes LO,HI");
    rule.kind = Kind::geometric;
    rule.first = parse_double(args[0], "geometric low");
    rule.second = parse_double(args[1], "geometric high");
    if (!(rule.first > 0.0 && rule.second > 0.0)) {
      throw ConfigError("geometric endpoints must be positive");
    }
  } else if (kind == "list") {
    if (args.empty()) throw ConfigError("list needs at least one value");
    rule.kind = Kind::list;
    for (const auto& a : args) rule.values.push_back(parse_double(a, "list"));
  } else if (kind == "gaussian") {
    if (args.empty() || args.size() > 2) {
      throw ConfigError("gaussian takes SEED[,SCALE]");
    }
    rule.kind = Kind::gaussian;
    rule.seed = parse_u64(args[0], "gaussian seed");
    if (args.size() == 2) rule.second = parse_double(args[1], "gaussian scale");
  } else {
    throw ConfigError("unknown value rule '" + kind + "'");
  }
  return rule;
}

std::string ValueRule::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::constant: os << "constant:" << first; break;
    case Kind::geometric: os << "geometric:" << first << ',' << second; break;
    case Kind::list:
      os << "list:";
      for (std::size_t k = 0; k < values.size(); ++k) {
        os << (k ? "," : "") << values[k];
      }
      break;
    case Kind::gaussian: os << "gaussian:" << seed << ',' << second; break;
  }
  return os.str();
}

std::vector<double> ValueRule::expand_scalars(std::size_t blocks) const {
  switch (kind) {
    case Kind::constant: return std::vector<double>(blocks, first);
    case Kind::geometric: {
      std::vector<double> out(blocks);
      const double ratio = second / first;
      for (std::size_t i = 0; i < blocks; ++i) {
        const double t =
            blocks == 1 ? 0.0
                        : static_cast<double>(i) / static_cast<double>(blocks - 1);
        out[i] = first * std::pow(ratio, t);
      }
      out.back() = blocks == 1 ? first : second;
      return out;
    }
    case Kind::list:
      if (values.size() != blocks) {
        throw ConfigError("list has " + std::to_string(values.size()) +
                          " values, expected " + std::to_string(blocks));
      }
      return values;
    case Kind::gaussian: {
      Rng rng(seed);
      std::vector<double> out(blocks);
      for (auto& v : out) v = second * rng.normal();
      return out;
    }
  }
  return {};
}

std::vector<double> ValueRule::expand_vectors(std::size_t blocks,
                                              std::size_t dim) const {
  const std::size_t total = blocks * dim;
  switch (kind) {
    case Kind::constant: return std::vector<double>(total, first);
    case Kind::geometric: {
      // Block i gets the i-th geometric scalar in every coordinate.
      const auto scalars = expand_scalars(blocks);
      std::vector<double> out(total);
      for (std::size_t i = 0; i < blocks; ++i) {
        for (std::size_t m = 0; m < dim; ++m) out[i * dim + m] = scalars[i];
      }
      return out;
    }
    case Kind::list:
      if (values.size() != total) {
        throw ConfigError("list has " + std::to_string(values.size()) +
                          " values, expected N*n = " + std::to_string(total));
      }
      return values;
    case Kind::gaussian: {
      Rng rng(seed);
      std::vector<double> out(total);
      for (auto& v : out) v = second * rng.normal();
      return out;
    }
  }
  return {};
}

ProblemFamilySpec ProblemSetup::family_spec() const {
  ProblemFamilySpec spec;
  spec.kind = kind;
  spec.blocks = blocks;
  spec.dim = dim;
  spec.lipschitz_multiplier = lipschitz_multiplier;
  switch (kind) {
    case FamilyKind::quadratic:
      spec.curvature =
          a.value_or(ValueRule::parse("constant:1")).expand_scalars(blocks);
      spec.linear =
          b.value_or(ValueRule::parse("gaussian:2")).expand_vectors(blocks, dim);
      break;
    case FamilyKind::pseudo_huber:
      spec.weight =
          w.value_or(ValueRule::parse("constant:1")).expand_scalars(blocks);
      break;
    case FamilyKind::softplus:
      spec.direction =
          c.value_or(ValueRule::parse("gaussian:3")).expand_vectors(blocks, dim);
      break;
  }
  return spec;
}

std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& item : split(text, ',')) {
    out.push_back(static_cast<std::size_t>(parse_u64(item, "index list")));
  }
  return out;
}

namespace {

using Setter = std::function<void(Config&, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"problem",
       {
           {"kind",
            [](Config& c, const std::string& v) {
              try {
                c.problem.kind = family_kind_from_string(trim(v));
              } catch (const InvalidInput& e) {
                throw ConfigError(e.what());
              }
            }},
           {"N",
            [](Config& c, const std::string& v) {
              c.problem.blocks = parse_u64(v, "problem.N");
            }},
           {"n",
            [](Config& c, const std::string& v) {
              c.problem.dim = parse_u64(v, "problem.n");
            }},
           {"a", [](Config& c, const std::string& v) { c.problem.a = ValueRule::parse(v); }},
           {"b", [](Config& c, const std::string& v) { c.problem.b = ValueRule::parse(v); }},
           {"w", [](Config& c, const std::string& v) { c.problem.w = ValueRule::parse(v); }},
           {"c", [](Config& c, const std::string& v) { c.problem.c = ValueRule::parse(v); }},
           {"x0", [](Config& c, const std::string& v) { c.problem.x0 = ValueRule::parse(v); }},
           {"lipschitz_multiplier",
            [](Config& c, const std::string& v) {
              c.problem.lipschitz_multiplier =
                  parse_double(v, "problem.lipschitz_multiplier");
            }},
       }},
      {"solver",
       {
           {"max_iters",
            [](Config& c, const std::string& v) {
              c.solver.max_iters = parse_u64(v, "solver.max_iters");
            }},
           {"gap_tol",
            [](Config& c, const std::string& v) {
              c.solver.gap_tol = parse_double(v, "solver.gap_tol");
            }},
           {"residual_tol",
            [](Config& c, const std::string& v) {
              c.solver.residual_tol = parse_double(v, "solver.residual_tol");
            }},
           {"record_stride",
            [](Config& c, const std::string& v) {
              c.solver.record_stride = parse_u64(v, "solver.record_stride");
            }},
           {"seed",
            [](Config& c, const std::string& v) {
              c.solver.seed = parse_u64(v, "solver.seed");
            }},
       }},
      {"experiment",
       {
           {"replicas",
            [](Config& c, const std::string& v) {
              c.experiment.replicas = parse_u64(v, "experiment.replicas");
            }},
           {"iters",
            [](Config& c, const std::string& v) {
              if (trim(v) == "auto") {
                c.experiment.iters.reset();
              } else {
                c.experiment.iters = parse_u64(v, "experiment.iters");
              }
            }},
           {"checkpoints",
            [](Config& c, const std::string& v) {
              c.experiment.checkpoints = parse_index_list(v);
            }},
           {"eps",
            [](Config& c, const std::string& v) {
              c.experiment.eps = parse_double(v, "experiment.eps");
            }},
           {"eps_rel",
            [](Config& c, const std::string& v) {
              c.experiment.eps_rel = parse_double(v, "experiment.eps_rel");
            }},
           {"rho",
            [](Config& c, const std::string& v) {
              c.experiment.rho = parse_double(v, "experiment.rho");
            }},
           {"workers",
            [](Config& c, const std::string& v) {
              c.experiment.workers = parse_u64(v, "experiment.workers");
            }},
           {"high_probability",
            [](Config& c, const std::string& v) {
              c.experiment.high_probability =
                  parse_bool(v, "experiment.high_probability");
            }},
           {"certify",
            [](Config& c, const std::string& v) {
              c.experiment.certify = parse_bool(v, "experiment.certify");
            }},
       }},
      {"bounds",
       {
           {"R_sq",
            [](Config& c, const std::string& v) {
              c.bounds.R_sq = parse_double(v, "bounds.R_sq");
            }},
           {"tilde_R_sq",
            [](Config& c, const std::string& v) {
              c.bounds.tilde_R_sq = parse_double(v, "bounds.tilde_R_sq");
            }},
           {"mu_f",
            [](Config& c, const std::string& v) {
              c.bounds.mu_f = parse_double(v, "bounds.mu_f");
            }},
           {"f_star",
            [](Config& c, const std::string& v) {
              c.bounds.f_star = parse_double(v, "bounds.f_star");
            }},
           {"k_max",
            [](Config& c, const std::string& v) {
              c.bounds.k_max = parse_u64(v, "bounds.k_max");
            }},
       }},
  };
  return table;
}

}  // namespace

Config parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  Config cfg;
  const auto& table = setters();
  for (const auto& [section, body] : tree) {
    const auto sec = table.find(section);
    if (sec == table.end() || body.data() != "") {
      throw ConfigError("unknown section or top-level key '" + section + "'");
    }
    for (const auto& [key, node] : body) {
      const auto setter = sec->second.find(key);
      if (setter == sec->second.end()) {
        throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      }
      try {
        setter->second(cfg, node.data());
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
    }
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in);
}

}  // namespace rbcd
