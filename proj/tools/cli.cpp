#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "ipdb/pqe.hpp"
#include "ipdb/spec_file.hpp"

namespace ipdb::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised with a fixed exit code so error reporting stays in one place.
struct Failure {
  int exit;
  std::string reason;
  std::string message;
};

int exit_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::WorldBudgetExceeded: return kBudget;
    case ErrorCode::ModeMismatch: return kModeMismatch;
    default: return kInvalid;
  }
}

spec::PdbSpec load(const std::string& path) {
  std::ifstream probe(path);
  if (!probe) throw IoError("cannot open '" + path + "'");
  return spec::load_file(path);
}

ordered_json mass_json(const MassBound& m) {
  if (m.is_exact()) return to_string(m.lower);
  ordered_json out{{"lower", to_string(m.lower)}};
  out["upper"] = m.upper ? ordered_json(to_string(*m.upper)) : ordered_json(nullptr);
  return out;
}

ordered_json instance_json(const BagInstance& d) {
  ordered_json out = ordered_json::object();
  for (const auto& [f, m] : d.entries()) out[f.to_string()] = m;
  return out;
}

ordered_json summary(const spec::AnyPdb& pdb) {
  return std::visit(
      [](const auto& m) -> ordered_json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, TiPdb>) {
          return {{"xi", to_string(m.total_mass())},
                  {"finite", m.family().is_finite()},
                  {"prefix_facts", m.family().prefix().size()}};
        } else if constexpr (std::is_same_v<T, BidPdb>) {
          return {{"expected_size", mass_json(total_mass(m.nonempty_family()))},
                  {"finite", m.is_finite()},
                  {"prefix_blocks", m.blocks().size()}};
        } else if constexpr (std::is_same_v<T, PoissonPdb>) {
          MassBound r = m.total_rate_bound();
          ordered_json out{{"finite", m.is_finite()}, {"prefix_facts", m.rates().size()}};
          out["total_rate"] = r.finite() ? ordered_json(r.upper->get_d()) : ordered_json(nullptr);
          return out;
        } else if constexpr (std::is_same_v<T, ExplicitWorldPdb>) {
          return {{"worlds", m.worlds().size()},
                  {"expected_size", to_string(expected_size(m))},
                  {"finite", true}};
        } else if constexpr (std::is_same_v<T, SuperposedPdb>) {
          return {{"components", m.components().size()},
                  {"has_tail", m.tail().has_value()},
                  {"finite", m.is_finite()},
                  {"nonempty_mass", mass_json(m.nonempty_mass())}};
        } else {
          return {{"total_intensity", m.total()}, {"pieces", m.pieces().size()}};
        }
      },
      pdb);
}

Sampler sampler_of(const spec::AnyPdb& pdb) {
  return std::visit(
      [](const auto& m) -> Sampler {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PiecewiseIntensity>)
          return [m](Rng& rng, const Rational&) { return sample_poisson_process(m, rng); };
        else
          return sampler_for(m);
      },
      pdb);
}

Rational positive_rational(const std::string& text, const char* what) {
  Rational r = parse_rational(text);
  if (r <= 0) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be positive");
  return r;
}

//===----------------------------------------------------------------------===//

int cmd_validate(const std::string& path, std::ostream& out) {
  ordered_json report{{"spec", path}};
  try {
    spec::PdbSpec s = load(path);
    report["kind"] = spec::kind_name(s.model);
    spec::AnyPdb pdb = spec::build(s.model);
    report["valid"] = true;
    ordered_json extra = summary(pdb);
    for (auto& [k, v] : extra.items()) report[k] = v;
    out << report.dump() << '\n';
    return kOk;
  } catch (const Error& e) {
    report["valid"] = false;
    report["reason"] = code_name(e.code());
    report["message"] = e.what();
    out << report.dump() << '\n';
    return kInvalid;
  }
}

int cmd_sample(const std::string& path, std::uint64_t count, std::uint64_t seed,
               const std::string& delta_text, std::ostream& out) {
  spec::PdbSpec s = load(path);
  spec::AnyPdb pdb = spec::build(s.model);
  Rational delta = positive_rational(delta_text, "--delta");
  Sampler sample = sampler_of(pdb);
  const Rng root(seed);
  for (std::uint64_t i = 0; i < count; ++i) {
    Rng rng = root.substream(i);
    out << instance_json(sample(rng, delta)).dump() << '\n';
  }
  return kOk;
}

struct PqeArgs {
  std::string path;
  std::string query;
  std::string mode = "exact";
  std::string eps = "1/100";
  std::uint64_t samples = 10000;
  std::uint64_t seed = 0;
  double confidence = 0.99;
  unsigned workers = 0;
};

int cmd_pqe(const PqeArgs& a, std::ostream& out) {
  spec::PdbSpec s = load(a.path);
  spec::AnyPdb pdb = spec::build(s.model);

  std::optional<Query> query;
  try {
    query = parse_query(a.query, &s.schema);
  } catch (const Error& e) {
    throw Failure{kQueryParse, std::string(code_name(e.code())), e.what()};
  }

  PqeOptions opts;
  opts.workers = a.workers;
  ordered_json result;
  ordered_json cert = ordered_json::object();

  if (a.mode == "exact") {
    PqeResult r = std::visit(
        [&](const auto& m) -> PqeResult {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, PoissonPdb> || std::is_same_v<T, PiecewiseIntensity>)
            throw Error(ErrorCode::ModeMismatch,
                        "exact mode needs finitely many worlds; use --mode mc");
          else
            return exact_pqe(m, *query, opts);
        },
        pdb);
    result["value"] = to_string(*r.exact);
    cert["worlds_enumerated"] = r.worlds_enumerated;
  } else if (a.mode == "approx") {
    const TiPdb* ti = std::get_if<TiPdb>(&pdb);
    if (!ti)
      throw Error(ErrorCode::ModeMismatch,
                  "approx mode needs a ti spec, got " + std::string(spec::kind_name(s.model)));
    PqeResult r = approx_pqe(*ti, *query, positive_rational(a.eps, "--eps"), opts);
    result["value"] = to_string(*r.exact);
    cert["eps"] = a.eps;
    cert["n"] = *r.truncation_n;
    cert["r_n"] = to_string(*r.tail_mass);
    cert["conditioning_mass_lower"] = to_string(*r.conditioning_mass_lower);
    cert["worlds_enumerated"] = r.worlds_enumerated;
  } else if (a.mode == "mc") {
    if (!(a.confidence > 0 && a.confidence < 1))
      throw Error(ErrorCode::InvalidArgument, "--confidence must lie in (0, 1)");
    PqeResult r = mc_pqe(sampler_of(pdb), *query, a.samples, a.confidence, a.seed, a.workers);
    result["value"] = r.value;
    cert["half_width"] = r.eps;
    cert["confidence"] = r.confidence;
    cert["samples"] = r.samples_drawn;
    cert["seed"] = a.seed;
    cert["sampler_delta"] = r.sampler_delta;
  } else {
    throw Failure{kUsage, "usage", "--mode must be exact, approx or mc"};
  }
  result["mode"] = a.mode;
  result["certificate"] = cert;
  out << result.dump() << '\n';
  return kOk;
}

struct CombineArgs {
  std::vector<std::string> superpose;
  std::vector<std::string> complete;
  std::optional<std::string> lambda_cap;
  std::string out_path;
};

int cmd_combine(const CombineArgs& a, std::ostream& out) {
  if (a.superpose.empty() == a.complete.empty())
    throw Failure{kUsage, "usage", "give exactly one of --superpose or --complete"};

  spec::PdbSpec result;
  auto merge_schema = [&](const spec::PdbSpec& s) {
    for (const auto& r : s.schema.relations()) result.schema.declare(r.name, r.arity);
    for (const auto& t : s.universe_tags)
      if (std::find(result.universe_tags.begin(), result.universe_tags.end(), t) ==
          result.universe_tags.end())
        result.universe_tags.push_back(t);
  };

  if (!a.superpose.empty()) {
    spec::SuperpositionSpec sp;
    for (const auto& path : a.superpose) {
      spec::PdbSpec s = load(path);
      merge_schema(s);
      sp.components.push_back(s.model);
    }
    result.model.value = std::move(sp);
  } else {
    if (a.complete.size() != 2)
      throw Failure{kUsage, "usage", "--complete takes a base spec and an extension spec"};
    spec::PdbSpec base = load(a.complete[0]);
    spec::PdbSpec ext = load(a.complete[1]);
    const auto* ext_ti = std::get_if<spec::TiSpec>(&ext.model.value);
    if (!ext_ti)
      throw Error(ErrorCode::InvalidSpec, "the completion extension must be a ti spec");
    merge_schema(base);
    merge_schema(ext);
    spec::CompletionSpec c;
    c.base.push_back(base.model);
    c.extension = *ext_ti;
    if (a.lambda_cap) c.lambda_cap = parse_rational(*a.lambda_cap);
    result.model.value = std::move(c);
  }

  spec::AnyPdb pdb = spec::build(result.model);
  std::ofstream file(a.out_path);
  if (!file) throw IoError("cannot write '" + a.out_path + "'");
  file << spec::emit(result).dump(2) << '\n';
  if (!file) throw IoError("failed writing '" + a.out_path + "'");

  ordered_json report{{"out", a.out_path}, {"kind", spec::kind_name(result.model)}};
  ordered_json extra = summary(pdb);
  for (auto& [k, v] : extra.items()) report[k] = v;
  out << report.dump() << '\n';
  return kOk;
}

int report_failure(std::ostream& err, int exit, std::string_view reason, std::string_view message) {
  err << ordered_json{{"error", reason}, {"message", message}}.dump() << '\n';
  return exit;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Countable probabilistic databases: validate, sample, query, combine", "ipdb"};
  app.require_subcommand(1);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a spec and report its summary");
  validate->add_option("spec", validate_path, "PDB spec file")->required();

  std::string sample_path;
  std::uint64_t sample_count = 1, sample_seed = 0;
  std::string sample_delta = "1/1000000000";
  auto* sample = app.add_subcommand("sample", "Draw instances as NDJSON");
  sample->add_option("spec", sample_path, "PDB spec file")->required();
  sample->add_option("--count", sample_count, "Number of instances");
  sample->add_option("--seed", sample_seed, "Random seed");
  sample->add_option("--delta", sample_delta, "Total-variation tolerance of the sampler");

  PqeArgs pqe_args;
  auto* pqe = app.add_subcommand("pqe", "Probability that a Boolean query holds");
  pqe->add_option("spec", pqe_args.path, "PDB spec file")->required();
  pqe->add_option("--query", pqe_args.query, "Boolean first-order query")->required();
  pqe->add_option("--mode", pqe_args.mode, "exact | approx | mc");
  pqe->add_option("--eps", pqe_args.eps, "Additive error for approx mode");
  pqe->add_option("--samples", pqe_args.samples, "Sample count for mc mode");
  pqe->add_option("--seed", pqe_args.seed, "Random seed for mc mode");
  pqe->add_option("--confidence", pqe_args.confidence, "Confidence level for mc mode");
  pqe->add_option("--workers", pqe_args.workers, "Worker threads (0: all cores)");

  CombineArgs combine_args;
  std::string lambda_cap;
  auto* combine = app.add_subcommand("combine", "Superpose specs or build a completion");
  combine->add_option("--superpose", combine_args.superpose, "Component spec files");
  combine->add_option("--complete", combine_args.complete, "Base spec and extension spec")
      ->expected(2);
  auto* cap = combine->add_option("--lambda-cap", lambda_cap, "Cap on extension marginals");
  combine->add_option("--out", combine_args.out_path, "Output spec path")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    return report_failure(err, kUsage, "usage", e.what());
  }
  if (*cap) combine_args.lambda_cap = lambda_cap;

  try {
    if (*validate) return cmd_validate(validate_path, out);
    if (*sample) return cmd_sample(sample_path, sample_count, sample_seed, sample_delta, out);
    if (*pqe) return cmd_pqe(pqe_args, out);
    return cmd_combine(combine_args, out);
  } catch (const Failure& f) {
    return report_failure(err, f.exit, f.reason, f.message);
  } catch (const IoError& e) {
    return report_failure(err, kIo, "io", e.what());
  } catch (const Error& e) {
    return report_failure(err, exit_for(e.code()), code_name(e.code()), e.what());
  }
}

}  // namespace ipdb::cli
