// wald4: classify 4-point metrics by curvature embeddability, build
// explicit circle/tripod product embeddings, evaluate negative-type
// inequalities, and run the seeded verification suites.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "wald4/errors.hpp"
#include "wald4/sampling.hpp"
#include "wald4/verify.hpp"
#include "wald4/wald.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSuiteFailed = 1;
constexpr int kExitInput = 2;
constexpr int kExitVerdict = 3;
constexpr int kExitInternal = 4;

struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string json_matrix(const Eigen::MatrixXd& m) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out += (i ? "," : "");
    out += "[";
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out += (j ? "," : "") + fmt(m(i, j));
    out += "]";
  }
  return out + "]";
}

std::string json_vector(const Eigen::VectorXd& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out += (i ? "," : "") + fmt(v[i]);
  return out + "]";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

wald4::FiniteSemimetric parse_json_metric(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("JSON parse failure: ") + e.what());
  }
  if (!j.is_object()) throw input_error("top-level JSON value must be an object");
  if (!j.contains("n") || !j["n"].is_number_integer())
    throw input_error("missing or non-integer field \"n\"");
  if (!j.contains("d") || !j["d"].is_array())
    throw input_error("missing or non-array field \"d\"");
  const int n = j["n"].get<int>();
  if (n < 2) throw input_error("field \"n\" must be at least 2");
  const auto& rows = j["d"];
  if (static_cast<int>(rows.size()) != n)
    throw input_error("field \"d\" must have n rows");
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i) {
    if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != n)
      throw input_error("field \"d\" row " + std::to_string(i + 1) +
                        " must have n entries");
    for (int k = 0; k < n; ++k) {
      if (!rows[i][k].is_number())
        throw input_error("field \"d\" entry (" + std::to_string(i + 1) + "," +
                          std::to_string(k + 1) + ") is not a number");
      d(i, k) = rows[i][k].get<double>();
    }
  }
  try {
    return wald4::make_semimetric(d);
  } catch (const std::invalid_argument& e) {
    throw input_error(std::string("field \"d\": ") + e.what());
  }
}

wald4::FiniteSemimetric parse_csv_metric(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        while (used < cell.size() &&
               std::isspace(static_cast<unsigned char>(cell[used])))
          ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw input_error("CSV line " + std::to_string(rows.size() + 1) +
                          ": bad number \"" + cell + "\"");
      }
    }
    rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  if (n < 2) throw input_error("CSV input must have at least 2 rows");
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n)
      throw input_error("CSV line " + std::to_string(i + 1) + " has " +
                        std::to_string(rows[i].size()) + " entries, expected " +
                        std::to_string(n));
    for (int k = 0; k < n; ++k) d(i, k) = rows[i][k];
  }
  try {
    return wald4::make_semimetric(d);
  } catch (const std::invalid_argument& e) {
    throw input_error(std::string("CSV matrix: ") + e.what());
  }
}

wald4::FiniteSemimetric load_metric(const std::string& path,
                                    const std::string& format) {
  const std::string text = read_file(path);
  if (format == "csv") return parse_csv_metric(text);
  return parse_json_metric(text);
}

Eigen::VectorXd parse_lambda_flag(const std::string& text) {
  std::vector<double> vals;
  std::istringstream cells(text);
  std::string cell;
  while (std::getline(cells, cell, ',')) {
    try {
      vals.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw input_error("bad lambda entry \"" + cell + "\"");
    }
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = vals[i];
  return v;
}

void write_output(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw input_error("cannot open output file: " + out_path);
  out << text;
}

std::string lambda_line(const wald4::LambdaArray& l) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < l.values.size(); ++i)
    out += (i ? ", " : "") + fmt6(l.values[i]);
  return out + ")";
}

int cmd_classify(const wald4::FiniteSemimetric& m,
                 const std::string& out_path) {
  if (m.n != 4) throw input_error("classify requires a 4x4 matrix");
  const auto rep = wald4::classify4(m);
  std::string text;
  const auto verdict = [](bool b) { return b ? "true" : "false"; };
  text += std::string("metric: ") + verdict(rep.metric) + "\n";
  if (!rep.metric)
    text += "  triangle violation: d(" + std::to_string(rep.triangle.i + 1) +
            "," + std::to_string(rep.triangle.k + 1) + ") exceeds the path via " +
            std::to_string(rep.triangle.j + 1) + " by " +
            fmt6(rep.triangle.violation) + "\n";
  text += std::string("euclidean: ") + verdict(rep.euclidean) + "\n";
  if (rep.euclidean_witness)
    text += "  witness lambda: " + lambda_line(*rep.euclidean_witness) + "\n";
  text += std::string("cbb: ") + verdict(rep.cbb) + "\n";
  if (rep.cbb_witness)
    text += "  witness lambda: " + lambda_line(*rep.cbb_witness) + "\n";
  text += std::string("cat: ") + verdict(rep.cat) + "\n";
  if (rep.cat_witness)
    text += "  witness lambda: " + lambda_line(*rep.cat_witness) + "\n";
  write_output(out_path, text);
  return kExitOk;
}

std::string embedding_json(const wald4::FiniteSemimetric& m,
                           const wald4::Embedding& e) {
  std::string factor;
  if (const auto* c = std::get_if<wald4::CircleFactor>(&e.factor)) {
    factor = "{\"kind\":\"circle\",\"r\":" + fmt(c->r) + ",\"angles\":[";
    for (int i = 0; i < 4; ++i) factor += (i ? "," : "") + fmt(c->angles[i]);
    factor += "]}";
  } else if (const auto* t = std::get_if<wald4::TripodFactor>(&e.factor)) {
    factor = "{\"kind\":\"tripod\",\"legs\":[";
    for (int i = 0; i < 3; ++i) factor += (i ? "," : "") + fmt(t->legs[i]);
    factor += "],\"placement\":[";
    for (int i = 0; i < 4; ++i)
      factor += std::string(i ? "," : "") + "[" +
                std::to_string(t->placement[i].first) + "," +
                fmt(t->placement[i].second) + "]";
    factor += "]}";
  } else {
    factor = "{\"kind\":\"none\"}";
  }
  return "{\"factor\":" + factor + ",\"euclid\":" + json_matrix(e.euclid) +
         ",\"residual\":" + fmt(wald4::verify_embedding(m, e)) + "}\n";
}

int cmd_embed(const wald4::FiniteSemimetric& m, const std::string& target,
              double tol_psd, double tol_embed, const std::string& out_path) {
  if (m.n != 4) throw input_error("embed requires a 4x4 matrix");
  const auto rep = wald4::classify4(m, tol_psd);
  const bool feasible = (target == "cbb") ? rep.cbb : rep.cat;
  if (!feasible) {
    const auto& witness = (target == "cbb") ? rep.cbb_witness : rep.cat_witness;
    std::cerr << "metric is not " << target << "-feasible";
    if (!rep.metric)
      std::cerr << " (triangle inequality fails)";
    else if (witness)
      std::cerr << "; witness lambda " << lambda_line(*witness)
                << " gives a positive negative-type value";
    std::cerr << "\n";
    return kExitVerdict;
  }
  const wald4::Embedding e = (target == "cbb")
                                 ? wald4::embed_cbb(m, tol_psd)
                                 : wald4::embed_cat(m, tol_psd);
  const double residual = wald4::verify_embedding(m, e);
  if (residual > tol_embed) {
    std::cerr << "embedding residual " << fmt(residual)
              << " exceeds tolerance " << fmt(tol_embed) << "\n";
    return kExitInternal;
  }
  write_output(out_path, embedding_json(m, e));
  return kExitOk;
}

int cmd_check(const wald4::FiniteSemimetric& m, const std::string& lambda_text,
              const std::string& out_path) {
  const Eigen::VectorXd raw = parse_lambda_flag(lambda_text);
  if (raw.size() != m.n)
    throw input_error("lambda has " + std::to_string(raw.size()) +
                      " entries, metric has " + std::to_string(m.n) + " points");
  wald4::LambdaArray l;
  try {
    l = wald4::make_lambda(raw);
  } catch (const std::invalid_argument& e) {
    throw input_error(e.what());
  }
  const double value = wald4::negtype_value(m, l);
  std::string text = "value: " + fmt(value) + "\n";
  text += "type: (" + std::to_string(l.type_pos) + "," +
          std::to_string(l.type_neg) + ")\n";
  text += (value <= 0.0) ? "holds\n" : "fails\n";
  write_output(out_path, text);
  return kExitOk;
}

std::string report_json(const wald4::VerificationReport& rep) {
  std::string out = "{\"suite\":\"" + rep.suite + "\"";
  out += ",\"seed\":" + std::to_string(rep.seed);
  out += ",\"trials\":" + std::to_string(rep.trials);
  out += ",\"failures\":" + std::to_string(rep.failures);
  out += std::string(",\"passed\":") + (rep.passed() ? "true" : "false");
  out += ",\"worst_residuals\":{";
  bool first = true;
  for (const auto& [prop, worst] : rep.worst_residual) {
    out += (first ? "" : ",");
    first = false;
    out += "\"" + prop + "\":{\"worst\":" + fmt(worst) +
           ",\"threshold\":" + fmt(rep.threshold.at(prop)) + "}";
  }
  out += "},\"witnesses\":[";
  for (std::size_t i = 0; i < rep.witnesses.size(); ++i) {
    const auto& w = rep.witnesses[i];
    out += (i ? "," : "");
    out += "{\"seed\":" + std::to_string(w.seed) +
           ",\"index\":" + std::to_string(w.index) + ",\"property\":\"" +
           w.property + "\",\"residual\":" + fmt(w.residual) +
           ",\"input\":\"" + json_escape(w.input) + "\"}";
  }
  out += "]}\n";
  return out;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, int trials,
               double tol_embed, const std::string& out_path) {
  const auto& names = wald4::suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end())
    throw input_error("unknown suite: " + suite);
  const auto start = std::chrono::steady_clock::now();
  const auto rep = wald4::run_suite(suite, seed, trials, tol_embed);
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;
  // Duration goes to stderr only, keeping the report byte-stable for
  // identical (suite, seed, trials).
  std::cerr << "suite " << suite << " finished in " << fmt6(elapsed.count())
            << " s\n";
  write_output(out_path, report_json(rep));
  return rep.passed() ? kExitOk : kExitSuiteFailed;
}

int cmd_sample(const std::string& space, std::uint64_t seed, int trials,
               const std::string& out_path) {
  wald4::SpaceDescriptor desc;
  try {
    desc = wald4::parse_descriptor(space);
  } catch (const std::invalid_argument& e) {
    throw input_error(e.what());
  }
  const auto metrics = wald4::sample(desc, trials, seed);
  std::string out = "[";
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    out += (i ? ",\n" : "\n");
    out += "{\"n\":" + std::to_string(metrics[i].n) +
           ",\"d\":" + json_matrix(metrics[i].d) + "}";
  }
  out += "\n]\n";
  write_output(out_path, out);
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"4-point metric curvature classifier and embedder"};
  app.require_subcommand(1);

  std::string input, format = "json", target, lambda_text, suite, space;
  std::string out_path;
  std::uint64_t seed = 0;
  int trials = 1000;
  double tol_psd = wald4::kPsdTol;
  double tol_embed = wald4::kEmbedTol;

  auto* classify = app.add_subcommand("classify", "four embeddability verdicts");
  classify->add_option("--input", input)->required();
  classify->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  classify->add_option("--output", out_path);

  auto* embed = app.add_subcommand("embed", "construct a product embedding");
  embed->add_option("--input", input)->required();
  embed->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  embed->add_option("--target", target)
      ->required()
      ->check(CLI::IsMember({"cbb", "cat"}));
  embed->add_option("--tol-psd", tol_psd)->check(CLI::PositiveNumber);
  embed->add_option("--tol-embed", tol_embed)->check(CLI::PositiveNumber);
  embed->add_option("--output", out_path);

  auto* check = app.add_subcommand("check", "evaluate one negative-type inequality");
  check->add_option("--input", input)->required();
  check->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  check->add_option("--lambda", lambda_text)->required();
  check->add_option("--output", out_path);

  auto* verify = app.add_subcommand("verify", "run a seeded property suite");
  verify->add_option("--suite", suite)->required();
  verify->add_option("--seed", seed);
  verify->add_option("--trials", trials)->check(CLI::PositiveNumber);
  verify->add_option("--tol-embed", tol_embed)->check(CLI::PositiveNumber);
  verify->add_option("--output", out_path);

  auto* sampler = app.add_subcommand("sample", "draw metrics from a model space");
  sampler->add_option("--space", space)->required();
  sampler->add_option("--seed", seed);
  sampler->add_option("--trials", trials)->check(CLI::PositiveNumber);
  sampler->add_option("--output", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (classify->parsed()) return cmd_classify(load_metric(input, format), out_path);
    if (embed->parsed())
      return cmd_embed(load_metric(input, format), target, tol_psd, tol_embed,
                       out_path);
    if (check->parsed())
      return cmd_check(load_metric(input, format), lambda_text, out_path);
    if (verify->parsed()) return cmd_verify(suite, seed, trials, tol_embed, out_path);
    if (sampler->parsed()) return cmd_sample(space, seed, trials, out_path);
  } catch (const input_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const wald4::internal_inconsistency_error& e) {
    std::cerr << "internal inconsistency: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
