// Command-line front end: every command prints one JSON document on stdout
// and logs to stderr. Exit codes: 0 verified/coincident, 1 not coincident or
// failed verification, 2 unknown, 3 input error.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "colligo/coincidence.hpp"
#include "colligo/json_io.hpp"
#include "colligo/kernels.hpp"
#include "colligo/suite.hpp"

namespace {

using namespace colligo;

constexpr int kInputError = 3;

struct Options {
  double tol = 1e-8;
  double rank_tol = 1e-9;
  int order = 8;
  int samples = 40;
  std::uint64_t seed = 0;
  std::string z;

  Tolerances tolerances() const {
    Tolerances t;
    t.residual = tol;
    t.rank = rank_tol;
    t.taylor_order = order;
    t.sample_budget = samples;
    return t;
  }
};

struct Outcome {
  Json json;
  int code = 0;
};

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

Json error_json(std::string_view code, const std::string& message,
                const std::string& path) {
  return Json{{"code", std::string(code)}, {"message", message}, {"path", path}};
}

Colligation load_colligation(const std::string& file) {
  return colligation_from_json(read_json_file(file), "");
}

// "--z re,im,..." holds either d complex coordinates or d real ones.
Point parse_point(const std::string& text, int d) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("--z expects comma-separated numbers", "--z");
    }
  }
  Point z(d);
  if (static_cast<int>(values.size()) == 2 * d) {
    for (int k = 0; k < d; ++k) z(k) = {values[2 * k], values[2 * k + 1]};
  } else if (static_cast<int>(values.size()) == d) {
    for (int k = 0; k < d; ++k) z(k) = values[k];
  } else {
    throw InputError("--z needs d real or 2d re,im values", "--z");
  }
  return z;
}

Json class_json(const ColligationClass& c) {
  return Json{{"verdict", std::string(to_string(c.verdict))},
              {"coisometry_defect", c.coisometry_defect},
              {"isometry_defect", c.isometry_defect},
              {"unitarity_defect", c.unitarity_defect},
              {"contraction_excess", c.contraction_excess}};
}

Outcome cmd_gen(const std::string& kind, int d, Eigen::Index n, Eigen::Index p,
                Eigen::Index q, const Options& o) {
  if (kind == "pair") {
    const Colligation phi = p >= (d - 1) * n + q
                                ? random_functional_model(d, n, p, q, o.seed)
                                : random_colligation(d, n, p, q, Verdict::Unitary, o.seed);
    Rng rng(o.seed ^ 0x5bd1e995ULL);
    const MatrixXc lambda = random_unitary(n, rng);
    const MatrixXc alpha = random_unitary(p, rng);
    const MatrixXc beta = random_unitary(q, rng);
    const Colligation psi = rotate(phi, lambda, alpha, beta);
    std::cerr << "gen pair: psi = beta phi alpha^*\n";
    return {Json{{"phi", to_json(phi)},
                 {"psi", to_json(psi)},
                 {"alpha", to_json(alpha)},
                 {"beta", to_json(beta)}}};
  }
  Colligation u;
  if (kind == "model") {
    u = random_functional_model(d, n, p, q, o.seed);
  } else {
    Verdict target;
    if (kind == "unitary") {
      target = Verdict::Unitary;
    } else if (kind == "coisometric") {
      target = Verdict::Coisometric;
    } else if (kind == "isometric") {
      target = Verdict::Isometric;
    } else if (kind == "strict-contraction") {
      target = Verdict::Contractive;
    } else {
      throw InputError("unknown generator kind \"" + kind + "\"", "kind");
    }
    u = random_colligation(d, n, p, q, target, o.seed);
  }
  std::cerr << "gen " << kind << ": d=" << d << " n=" << n << " p=" << p << " q=" << q
            << "\n";
  return {to_json(u)};
}

Outcome cmd_eval(const std::string& file, const Options& o) {
  const Colligation u = load_colligation(file);
  if (o.z.empty()) throw InputError("eval needs --z", "--z");
  return {to_json(eval_transfer(u, parse_point(o.z, u.d)))};
}

Outcome cmd_classify(const std::string& file, const Options& o) {
  const ColligationClass c = classify(load_colligation(file), o.tol);
  std::cerr << "classify: " << to_string(c.verdict) << "\n";
  return {class_json(c)};
}

Outcome cmd_gram(const std::string& file, const std::string& points_file,
                 const Options& o) {
  const Colligation u = load_colligation(file);
  const std::vector<Point> pts = points_from_json(read_json_file(points_file), u.d);
  const GramReport g = kphi_gram(u, pts, {}, o.rank_tol);
  return {Json{{"gram", to_json(g.gram)},
               {"min_eigenvalue", g.min_eigenvalue},
               {"psd", g.psd}},
          g.psd ? 0 : 1};
}

Outcome cmd_model(const std::string& file, const Options& o) {
  const Colligation u = load_colligation(file);
  const Tolerances t = o.tolerances();
  const FunctionalModelReport rep = verify_functional_model(u, o.order, o.tol, o.rank_tol);
  Json j{{"observability_rank", rep.observability_rank},
         {"shift_residual", rep.shift_residual},
         {"coisometric", rep.coisometric},
         {"passed", rep.passed}};
  const ModelApparatus app = build_apparatus(u, t, o.seed);
  const ParameterExtraction par = extract_parameter(u, app, t);
  j["kernel_dim"] = app.U0.dim();
  j["d_phi_dim"] = app.d_phi.dim();
  j["defect_dim"] = app.defect1_range.dim();
  j["zeta"] = to_json(par.zeta);
  j["zeta_isometric"] = par.isometric;
  j["zeta_isometry_defect"] = par.isometry_defect;
  j["residuals"] = app.residuals;
  std::cerr << "model: " << (rep.passed ? "functional model" : "not a functional model")
            << "\n";
  return {j, rep.passed ? 0 : 1};
}

Outcome cmd_jreduce(const std::string& file, const Options& o) {
  const Colligation u = load_colligation(file);
  const Tolerances t = o.tolerances();
  const ModelApparatus app = build_apparatus(u, t, o.seed);
  const ParameterExtraction par = extract_parameter(u, app, t);
  const JReduction red = j_reduction(u, app, par, t);
  return {Json{{"reduced", to_json(red.reduced)},
               {"J", to_json(red.J)},
               {"xi_iso", to_json(red.xi_iso)},
               {"n_space_dim", red.n_space_dim},
               {"defect_dim", app.defect1_range.dim()},
               {"zeta_isometric", par.isometric},
               {"verdict", std::string(to_string(classify(red.reduced, o.tol).verdict))}}};
}

Outcome cmd_coincide(const std::string& f1, const std::string& f2, const Options& o) {
  const Colligation phi = load_colligation(f1);
  const Colligation psi = load_colligation(f2);
  const PipelineReport rep = coincide_pipeline(phi, psi, o.tolerances(), o.seed);
  Json j{{"verdict", std::string(to_string(rep.verdict))}};
  if (!rep.reason.empty()) j["reason"] = rep.reason;
  if (rep.coincidence) {
    j["alpha"] = to_json(rep.coincidence->alpha);
    j["beta"] = to_json(rep.coincidence->beta);
    j["coincidence_residual"] = rep.coincidence->residual;
  }
  if (rep.witness) {
    const Json w = to_json(*rep.witness);
    for (const auto& [key, value] : w.items()) j[key] = value;
    j["reduced"] = rep.reduced;
    if (rep.reduced) {
      j["first"] = to_json(*rep.first);
      j["second"] = to_json(*rep.second);
    }
    Json res = rep.residuals;
    res["block"] = rep.unitary_check.block_residual;
    res["transfer"] = rep.unitary_check.transfer_residual;
    res["diagram"] = rep.diagram_residual;
    j["residuals"] = res;
    j["kernel_dims"] = Json::array({rep.kernel_dim_first, rep.kernel_dim_second});
  }
  std::cerr << "coincide: " << to_string(rep.verdict) << "\n";
  return {j, exit_code(rep.verdict)};
}

Outcome cmd_witness_verify(const std::string& f1, const std::string& f2,
                           const std::string& wf, const Options& o) {
  const Colligation phi = load_colligation(f1);
  const Colligation psi = load_colligation(f2);
  const Json wj = read_json_file(wf);
  const Tolerances t = o.tolerances();
  Json out;
  bool passed = true;
  if (wj.contains("Lambda")) {
    const UnitaryCoincidenceWitness w = unitary_witness_from_json(wj);
    const bool reduced = wj.value("reduced", false);
    const Colligation first = reduced ? colligation_from_json(wj.at("first"), "/first") : phi;
    const Colligation second =
        reduced ? colligation_from_json(wj.at("second"), "/second") : psi;
    const UnitaryCheck check = verify_unitary_coincidence(first, second, w, o.tol, o.seed);
    out["block_residual"] = check.block_residual;
    out["transfer_residual"] = check.transfer_residual;
    double residual = std::max(check.block_residual, check.transfer_residual);
    passed = check.passed;
    if (passed) {
      // The witness must also yield a coincidence of the given pair.
      const Eigen::Index k =
          kernel_space(phi, kernel_space_order(phi), o.rank_tol).dim();
      const CoincidenceWitness back = coincidence_from_unitary(
          phi, psi, w, MatrixXc::Identity(k, k), t, o.seed);
      out["recovered_residual"] = back.residual;
      residual = std::max(residual, back.residual);
    }
    out["residual"] = residual;
  } else {
    const CoincidenceWitness w = coincidence_witness_from_json(wj);
    Rng rng(o.seed);
    const CoincidenceCheck check = verify_coincidence(
        phi, psi, w.alpha, w.beta, sample_ball_points(phi.d, 20, rng), o.tol, o.order);
    out["residual"] = check.witness.residual;
    passed = check.passed;
  }
  out["passed"] = passed;
  std::cerr << "witness-verify: " << (passed ? "verified" : "failed") << "\n";
  return {out, passed ? 0 : 1};
}

Outcome cmd_suite(const Options& o) {
  SuiteOptions s;
  s.tol = o.tolerances();
  s.seed = o.seed == 0 ? 1 : o.seed;
  Json rows = Json::array();
  bool all = true;
  for (const CriterionResult& r : run_acceptance_suite(s)) {
    std::cerr << (r.passed ? "PASS " : "FAIL ") << r.id << " " << r.name << " ("
              << r.seconds << " s): " << r.detail << "\n";
    rows.push_back(Json{{"id", r.id}, {"name", r.name}, {"passed", r.passed},
                        {"detail", r.detail}});
    all = all && r.passed;
  }
  return {Json{{"criteria", rows}, {"passed", all}}, all ? 0 : 1};
}

bool is_input_error(ErrorCode c) {
  return c == ErrorCode::InvalidInput || c == ErrorCode::DimensionMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Colligations, de Branges-Rovnyak models and coincidence witnesses"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--tol", o.tol, "residual tolerance")->check(CLI::PositiveNumber);
  app.add_option("--rank-tol", o.rank_tol, "relative rank tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--order", o.order, "Taylor order")->check(CLI::Range(1, 64));
  app.add_option("--samples", o.samples, "sample budget")->check(CLI::Range(1, 100000));
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--z", o.z, "evaluation point re,im[,re,im...]");

  std::string kind, file, file2, file3;
  int d = 2;
  Eigen::Index n = 2, p = 3, q = 1;
  auto* gen = app.add_subcommand("gen", "generate a seeded colligation or pair");
  gen->add_option("kind", kind,
                  "unitary | coisometric | isometric | strict-contraction | model | pair")
      ->required();
  gen->add_option("--d", d)->check(CLI::Range(1, 16));
  gen->add_option("--n", n)->check(CLI::NonNegativeNumber);
  gen->add_option("--p", p)->check(CLI::NonNegativeNumber);
  gen->add_option("--q", q)->check(CLI::NonNegativeNumber);

  auto one_file = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("colligation", file, "colligation JSON")->required();
    return sub;
  };
  auto* eval = one_file("eval", "evaluate the transfer function at --z");
  auto* cls = one_file("classify", "classify the colligation operator");
  auto* gram = one_file("gram", "Gram matrix of k_phi on a point set");
  gram->add_option("points", file2, "points JSON")->required();
  auto* model = one_file("model", "functional model check and apparatus summary");
  auto* jred = one_file("jreduce", "J-reduction to a coisometric model");
  auto* coin = app.add_subcommand("coincide", "decide coincidence and build a witness");
  coin->add_option("phi", file)->required();
  coin->add_option("psi", file2)->required();
  auto* wver = app.add_subcommand("witness-verify", "verify a witness for a pair");
  wver->add_option("phi", file)->required();
  wver->add_option("psi", file2)->required();
  wver->add_option("witness", file3)->required();
  auto* suite = app.add_subcommand("suite", "run the acceptance battery");
  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    emit(error_json("InvalidInput", e.what(), "argv"));
    return kInputError;
  }

  try {
    Outcome out;
    if (gen->parsed()) {
      out = cmd_gen(kind, d, n, p, q, o);
    } else if (eval->parsed()) {
      out = cmd_eval(file, o);
    } else if (cls->parsed()) {
      out = cmd_classify(file, o);
    } else if (gram->parsed()) {
      out = cmd_gram(file, file2, o);
    } else if (model->parsed()) {
      out = cmd_model(file, o);
    } else if (jred->parsed()) {
      out = cmd_jreduce(file, o);
    } else if (coin->parsed()) {
      out = cmd_coincide(file, file2, o);
    } else if (wver->parsed()) {
      out = cmd_witness_verify(file, file2, file3, o);
    } else if (suite->parsed()) {
      out = cmd_suite(o);
    }
    emit(out.json);
    return out.code;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    emit(error_json(to_string(e.code()), e.message(), e.path()));
    return kInputError;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    emit(error_json(to_string(e.code()), e.message(), ""));
    return is_input_error(e.code()) ? kInputError : 1;
  } catch (const Json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    emit(error_json("InvalidInput", e.what(), ""));
    return kInputError;
  }
}
