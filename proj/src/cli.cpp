#include "fracrot/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>

#include <CLI11.hpp>

#include "fracrot/fracpow.hpp"
#include "fracrot/rotation.hpp"

namespace fracrot::cli {

namespace {

using Axis = UnitAxis<double>;

enum class Format { kJson, kCsv };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

std::string json_array(const std::vector<double>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += format_number(xs[i]);
  }
  return out + "]";
}

std::vector<double> flatten(const Mat3d& m) {
  std::vector<double> out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.push_back(m(i, j));
  return out;
}

using InputValue = std::variant<double, int, std::string, std::vector<double>>;

/// One structured result per invocation, keys in a fixed order:
/// command, inputs, result, method, error_estimate.
struct Envelope {
  std::string command;
  std::vector<std::pair<std::string, InputValue>> inputs;
  std::string result_kind;  // "matrix", "vector" or "table"
  std::vector<double> values;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;  // optional row names for tables
  std::string method;
  std::optional<double> error_estimate;

  std::string json() const {
    std::ostringstream os;
    os << "{\"command\":" << json_string(command) << ",\"inputs\":{";
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (i) os << ",";
      os << json_string(inputs[i].first) << ":";
      std::visit(
          [&os](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) os << format_number(v);
            else if constexpr (std::is_same_v<T, int>) os << v;
            else if constexpr (std::is_same_v<T, std::string>) os << json_string(v);
            else os << json_array(v);
          },
          inputs[i].second);
    }
    os << "},\"result\":{\"kind\":" << json_string(result_kind);
    if (result_kind == "table") {
      os << ",\"columns\":[";
      for (std::size_t i = 0; i < columns.size(); ++i)
        os << (i ? "," : "") << json_string(columns[i]);
      os << "]";
      if (!labels.empty()) {
        os << ",\"labels\":[";
        for (std::size_t i = 0; i < labels.size(); ++i)
          os << (i ? "," : "") << json_string(labels[i]);
        os << "]";
      }
      os << ",\"rows\":[";
      for (std::size_t i = 0; i < rows.size(); ++i) os << (i ? "," : "") << json_array(rows[i]);
      os << "]";
    } else {
      os << ",\"values\":" << json_array(values);
    }
    os << "},\"method\":" << json_string(method);
    if (error_estimate) os << ",\"error_estimate\":" << format_number(*error_estimate);
    os << "}\n";
    return os.str();
  }

  std::string csv() const {
    std::ostringstream os;
    if (result_kind == "table") {
      for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
      os << "\n";
      for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
        os << "\n";
      }
      return os.str();
    }
    const std::vector<std::string> names =
        result_kind == "matrix"
            ? std::vector<std::string>{"r11", "r12", "r13", "r21", "r22", "r23", "r31", "r32", "r33"}
            : std::vector<std::string>{"x", "y", "z"};
    for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << names[i];
    if (error_estimate) os << ",error_estimate";
    os << "\n";
    for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << format_number(values[i]);
    if (error_estimate) os << "," << format_number(*error_estimate);
    os << "\n";
    return os.str();
  }
};

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError(flag + ": '" + item + "' is not a number");
    }
    if (used != item.size()) throw UsageError(flag + ": '" + item + "' is not a number");
    out.push_back(x);
  }
  return out;
}

Vec3d parse_vec3(const std::string& text, const std::string& flag) {
  const auto xs = parse_list(text, flag);
  if (xs.size() != 3) throw UsageError(flag + " expects three comma-separated numbers");
  return {xs[0], xs[1], xs[2]};
}

Axis parse_axis(const std::string& text) {
  try {
    return Axis(parse_vec3(text, "--axis"));
  } catch (const InvalidAxis& e) {
    throw UsageError(std::string("--axis: ") + e.what());
  }
}

enum class Method { kClosed, kQuadrature, kExpGenerator, kOracle };

Method parse_method(const std::string& name) {
  if (name == "closed") return Method::kClosed;
  if (name == "quadrature" || name == "fracpow") return Method::kQuadrature;
  if (name == "exp-generator") return Method::kExpGenerator;
  if (name == "oracle") return Method::kOracle;
  throw UsageError("--method: unknown method '" + name + "'");
}

const char* method_name(Method m) {
  switch (m) {
    case Method::kClosed: return "closed";
    case Method::kQuadrature: return "quadrature";
    case Method::kExpGenerator: return "exp-generator";
    case Method::kOracle: return "oracle";
  }
  return "unknown";
}

QuadratureMethod parse_rule(const std::string& name) {
  if (name == "double-exponential" || name == "de") return QuadratureMethod::kDoubleExponential;
  if (name == "gauss-legendre-split" || name == "gl") return QuadratureMethod::kGaussLegendreSplit;
  throw UsageError("--rule: unknown quadrature rule '" + name + "'");
}

std::vector<double> axis_echo(const Axis& axis) {
  return {axis.n1(), axis.n2(), axis.n3()};
}

/// A^alpha(n, pi/2) by the requested route.
QuadratureResult<double> quarter_turn_power(const Axis& axis, double alpha, Method method,
                                            const QuadratureConfig& cfg) {
  switch (method) {
    case Method::kClosed:
      if (std::abs(alpha) <= 1) return {frac_power_closed(axis, alpha).matrix(), 0, 0};
      return {rotation_of(axis, alpha * kPi<double> / 2).matrix(), 0, 0};
    case Method::kQuadrature:
      return real_power_estimate(quarter_turn(axis).matrix(), alpha, cfg);
    case Method::kExpGenerator:
      return {mat_exp(Mat3d(alpha * kPi<double> / 2 * generator(axis))), 0, 0};
    case Method::kOracle:
      return {eig_power_oracle(quarter_turn(axis).matrix(), alpha), 0, 0};
  }
  throw UsageError("unreachable");
}

struct Options {
  std::string axis = "0,0,1";
  double angle = 0;
  bool degrees = false;
  double alpha = 0;
  std::string method = "closed";
  std::string rule = "double-exponential";
  int level = QuadratureConfig{}.level;
  int steps = 1;
  double from = 0;
  double to = 0;
  std::string levels = "3,4,5,6,7,8";
  std::string suite = "all";
  double tol = 1e-8;
  std::string output;
  std::string vector = "1,0,0";
  double time = 0;
};

double to_radians(double x, bool degrees) { return degrees ? x * kPi<double> / 180 : x; }

Format parse_format(const std::string& name, Format fallback) {
  if (name.empty()) return fallback;
  if (name == "json") return Format::kJson;
  if (name == "csv") return Format::kCsv;
  throw UsageError("--output: expected json or csv, got '" + name + "'");
}

void emit(const Envelope& env, Format format, std::ostream& out) {
  out << (format == Format::kJson ? env.json() : env.csv());
}

QuadratureConfig config_from(const Options& o) {
  QuadratureConfig cfg;
  cfg.method = parse_rule(o.rule);
  cfg.level = o.level;
  if (cfg.level < 1) throw UsageError("--level must be >= 1");
  return cfg;
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_verify_csv(const verify::Report& report, std::ostream& out) {
  out << "suite,property,max_error,bound,status\n";
  for (const auto& p : report.properties) {
    out << p.suite << "," << p.name << "," << format_number(p.max_error) << ","
        << format_number(p.bound) << "," << (p.passed ? "pass" : "FAIL") << "\n";
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rotations as fractional powers of the quarter-turn matrix", "fracrot"};
  app.require_subcommand(1);
  Options o;

  auto add_axis = [&o](CLI::App* cmd) {
    cmd->add_option("--axis", o.axis, "rotation axis x,y,z (normalized)")->required();
  };
  auto add_angle = [&o](CLI::App* cmd) {
    cmd->add_option("--angle", o.angle, "angle in radians")->required();
    cmd->add_flag("--degrees", o.degrees, "interpret angles as degrees");
  };
  auto add_output = [&o](CLI::App* cmd) {
    cmd->add_option("--output", o.output, "json or csv");
  };
  auto add_quadrature = [&o](CLI::App* cmd) {
    cmd->add_option("--level", o.level, "quadrature level (nodes per panel for gauss-legendre-split)");
    cmd->add_option("--rule", o.rule, "double-exponential or gauss-legendre-split");
  };

  auto* matrix = app.add_subcommand("matrix", "rotation matrix A(n, theta)");
  add_axis(matrix);
  add_angle(matrix);
  matrix->add_option("--method", o.method, "closed, quadrature (fracpow), exp-generator or oracle");
  add_quadrature(matrix);
  add_output(matrix);

  auto* power = app.add_subcommand("power", "fractional power A^alpha(n, pi/2)");
  add_axis(power);
  power->add_option("--alpha", o.alpha, "exponent")->required();
  power->add_option("--method", o.method, "closed, quadrature (fracpow), exp-generator or oracle");
  add_quadrature(power);
  add_output(power);

  auto* rotate = app.add_subcommand("rotate", "rotate a vector");
  add_axis(rotate);
  add_angle(rotate);
  rotate->add_option("--vector", o.vector, "vector x,y,z")->required();
  add_output(rotate);

  auto* interp = app.add_subcommand("interp", "rotations from --from to --to about one axis");
  add_axis(interp);
  interp->add_option("--from", o.from, "start angle")->required();
  interp->add_option("--to", o.to, "end angle")->required();
  interp->add_option("--steps", o.steps, "number of intervals")->required();
  interp->add_flag("--degrees", o.degrees, "interpret angles as degrees");
  add_output(interp);

  auto* convergence = app.add_subcommand("convergence", "quadrature error per level");
  add_axis(convergence);
  convergence->add_option("--alpha", o.alpha, "exponent in (0, 1)")->required();
  convergence->add_option("--levels", o.levels, "comma-separated increasing levels");
  convergence->add_option("--rule", o.rule, "double-exponential or gauss-legendre-split");
  add_output(convergence);

  auto* verify_cmd = app.add_subcommand("verify", "run the property suites");
  verify_cmd->add_option("--suite", o.suite, "all, rotation or fracpow");
  verify_cmd->add_option("--tol", o.tol, "tolerance for round-off properties");
  add_output(verify_cmd);

  auto* log_cmd = app.add_subcommand("log", "principal logarithm theta G");
  add_axis(log_cmd);
  add_angle(log_cmd);
  add_output(log_cmd);

  auto* generator_cmd = app.add_subcommand("generator", "infinitesimal generator G");
  add_axis(generator_cmd);
  add_output(generator_cmd);

  auto* semigroup_cmd = app.add_subcommand("semigroup", "T(t) = exp(t A(n, pi/2))");
  add_axis(semigroup_cmd);
  semigroup_cmd->add_option("--time", o.time, "semigroup parameter t")->required();
  add_output(semigroup_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  Envelope env;
  env.command = command;
  Format format = Format::kJson;

  try {
    const bool table = command == "interp" || command == "convergence" || command == "verify";
    format = parse_format(o.output, table ? Format::kCsv : Format::kJson);

    if (command == "verify") {
      if (!(o.tol > 0)) throw UsageError("--tol must be positive");
      const auto report = verify::run(verify::parse_suite(o.suite), o.tol);
      if (format == Format::kCsv) {
        write_verify_csv(report, out);
      } else {
        env.inputs = {{"suite", o.suite}, {"tol", o.tol}};
        env.result_kind = "table";
        env.columns = {"max_error", "bound", "passed"};
        for (const auto& p : report.properties) {
          env.rows.push_back({p.max_error, p.bound, p.passed ? 1.0 : 0.0});
          env.labels.push_back(p.suite + "." + p.name);
        }
        env.method = "verify";
        emit(env, format, out);
      }
      return exit_code_for(report);
    }

    const Axis axis = parse_axis(o.axis);
    env.inputs.push_back({"axis", axis_echo(axis)});

    if (command == "matrix") {
      const double theta = to_radians(o.angle, o.degrees);
      const Method method = parse_method(o.method);
      const QuadratureConfig cfg = config_from(o);
      env.inputs.push_back({"angle", theta});
      env.inputs.push_back({"method", std::string(method_name(method))});
      env.result_kind = "matrix";
      env.method = method_name(method);
      if (method == Method::kClosed) {
        env.values = flatten(rodrigues(axis, theta).matrix());
        env.method = "closed";
      } else {
        const auto r = quarter_turn_power(axis, 2 * theta / kPi<double>, method, cfg);
        env.values = flatten(r.value);
        if (method == Method::kQuadrature) {
          env.inputs.push_back({"level", cfg.level});
          env.inputs.push_back({"rule", std::string(to_string(cfg.method))});
          env.error_estimate = r.error_estimate;
        }
      }
    } else if (command == "power") {
      const Method method = parse_method(o.method);
      const QuadratureConfig cfg = config_from(o);
      env.inputs.push_back({"alpha", o.alpha});
      env.inputs.push_back({"method", std::string(method_name(method))});
      const auto r = quarter_turn_power(axis, o.alpha, method, cfg);
      env.result_kind = "matrix";
      env.values = flatten(r.value);
      env.method = method_name(method);
      if (method == Method::kQuadrature) {
        env.inputs.push_back({"level", cfg.level});
        env.inputs.push_back({"rule", std::string(to_string(cfg.method))});
        env.error_estimate = r.error_estimate;
      }
    } else if (command == "rotate") {
      const double theta = to_radians(o.angle, o.degrees);
      const Vec3d u = parse_vec3(o.vector, "--vector");
      env.inputs.push_back({"angle", theta});
      env.inputs.push_back({"vector", std::vector<double>{u(0), u(1), u(2)}});
      const Vec3d v = rotate_vector(axis, theta, u);
      env.result_kind = "vector";
      env.values = {v(0), v(1), v(2)};
      env.method = "rodrigues";
    } else if (command == "interp") {
      if (o.steps < 1) throw UsageError("--steps must be >= 1");
      const double from = to_radians(o.from, o.degrees);
      const double to = to_radians(o.to, o.degrees);
      env.inputs.push_back({"from", from});
      env.inputs.push_back({"to", to});
      env.inputs.push_back({"steps", o.steps});
      const auto path = interpolate(axis, from, to, o.steps);
      env.result_kind = "table";
      env.columns = {"index", "theta", "r11", "r12", "r13", "r21", "r22", "r23", "r31", "r32", "r33"};
      for (std::size_t k = 0; k < path.size(); ++k) {
        std::vector<double> row = {static_cast<double>(k),
                                   from + static_cast<double>(k) * (to - from) / o.steps};
        const auto entries = flatten(path[k].matrix());
        row.insert(row.end(), entries.begin(), entries.end());
        env.rows.push_back(std::move(row));
      }
      env.method = "fractional-power";
    } else if (command == "convergence") {
      std::vector<int> levels;
      for (double x : parse_list(o.levels, "--levels")) {
        if (x != std::floor(x) || x < 1) throw UsageError("--levels: levels must be positive integers");
        levels.push_back(static_cast<int>(x));
      }
      const QuadratureMethod rule = parse_rule(o.rule);
      env.inputs.push_back({"alpha", o.alpha});
      env.inputs.push_back({"rule", std::string(to_string(rule))});
      std::vector<double> echo(levels.begin(), levels.end());
      env.inputs.push_back({"levels", echo});
      if (!std::is_sorted(levels.begin(), levels.end()) ||
          std::adjacent_find(levels.begin(), levels.end()) != levels.end())
        throw UsageError("--levels must be strictly increasing");
      const auto report = convergence_study(quarter_turn(axis).matrix(), o.alpha, levels, rule);
      env.result_kind = "table";
      env.columns = {"level", "nodes", "frobenius_error"};
      for (const auto& row : report)
        env.rows.push_back({static_cast<double>(row.level), static_cast<double>(row.nodes), row.error});
      env.method = to_string(rule);
    } else if (command == "log") {
      const double theta = to_radians(o.angle, o.degrees);
      env.inputs.push_back({"angle", theta});
      env.result_kind = "matrix";
      env.values = flatten(log_rotation(axis, theta));
      env.method = "theta-times-generator";
    } else if (command == "generator") {
      env.result_kind = "matrix";
      env.values = flatten(generator(axis));
      env.method = "cross-product-matrix";
    } else if (command == "semigroup") {
      env.inputs.push_back({"time", o.time});
      env.result_kind = "matrix";
      env.values = flatten(semigroup(axis, o.time));
      env.method = "closed";
    }
    emit(env, format, out);
    return kSuccess;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    std::ostringstream os;
    os << "{\"command\":" << json_string(command) << ",\"error\":{\"kind\":"
       << json_string(e.kind()) << ",\"message\":" << json_string(e.what()) << "}}\n";
    out << os.str();
    return kEngineError;
  }
}

}  // namespace fracrot::cli
