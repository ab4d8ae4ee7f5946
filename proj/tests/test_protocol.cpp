#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "ppdispatch/brute_force_backend.hpp"
#include "ppdispatch/protocol.hpp"

using namespace ppd;

namespace {
const std::string kData = PPD_DATA_DIR;

Scenario toy() { return load_scenario(kData + "/toy.json"); }

std::map<std::string, BlaSecrets> secrets_for(const Scenario& s,
                                              const ProtocolResult& r,
                                              bool identity) {
  std::map<std::string, BlaSecrets> out;
  GridBlock gb = build_grid_block(s.network, s.horizon);
  CouplingMatrix A = coupling_matrix(s.network, gb.layout);
  for (std::size_t k = 0; k < A.bla_ids.size(); ++k) {
    const std::string& id = A.bla_ids[k];
    BlaSecrets sec;
    sec.compact = build_compact(s.bla(id));
    if (identity) {
      sec.keys.W = Mat::Identity(s.horizon, s.horizon);
      sec.keys.e_diag = Vec::Ones(2 * s.horizon);
      sec.keys.V = Mat::Identity(6 * s.horizon, 6 * s.horizon);
      sec.keys.duplication = 2;
    } else {
      sec.keys = generate_keys(s.horizon, mix_seed(s.seed, k), s.masking);
    }
    if (!r.aborted) sec.x_true = r.recovered_x.at(id);
    out[id] = std::move(sec);
  }
  return out;
}

}  // namespace

TEST_CASE("protocol equals the monolithic pipeline") {
  Scenario s = toy();
  BruteForceBackend bf;
  ProtocolResult pr = run_protocol(s, bf);
  REQUIRE_FALSE(pr.aborted);

  // Monolithic path with the same seeds.
  GridBlock gb = build_grid_block(s.network, s.horizon);
  CouplingMatrix A = coupling_matrix(s.network, gb.layout);
  std::vector<MaskedBla> uploads;
  std::vector<MaskingKeys> keys;
  for (std::size_t k = 0; k < A.bla_ids.size(); ++k) {
    keys.push_back(generate_keys(s.horizon, mix_seed(s.seed, k), s.masking));
    uploads.push_back(
        mask(build_compact(s.bla(A.bla_ids[k])), keys[k], A.bla_ids[k]));
  }
  AssembledProblem p1 = assemble_masked(gb, A, uploads);
  SolverResult direct = bf.solve(p1.problem, s.solver);
  REQUIRE(direct.status == SolveStatus::Optimal);

  // Bit-for-bit: the actor layer adds no computation.
  CHECK(pr.dso_result.objective == direct.objective);
  DispatchSolution direct_sol = extract_dispatch(direct, p1.layout, s.network);
  const Vec direct_x =
      recover_state(direct_sol.bla_pseudo.at("toybla"), keys[0].W);
  CHECK(pr.recovered_x.at("toybla") == direct_x);
}

TEST_CASE("replay determinism") {
  Scenario s = toy();
  BruteForceBackend bf;
  ProtocolResult a = run_protocol(s, bf);
  ProtocolResult b = run_protocol(s, bf);
  REQUIRE_FALSE(a.aborted);
  CHECK(a.transcript.hash() == b.transcript.hash());
  CHECK(a.transcript.messages.size() == b.transcript.messages.size());

  Scenario other = s;
  other.seed += 1;
  ProtocolResult c = run_protocol(other, bf);
  CHECK(a.transcript.hash() != c.transcript.hash());
}

TEST_CASE("message pattern: K uploads then K results") {
  Scenario s = toy();
  BruteForceBackend bf;
  ProtocolResult pr = run_protocol(s, bf);
  REQUIRE_FALSE(pr.aborted);
  const std::size_t K = s.blas.size();
  REQUIRE(pr.transcript.messages.size() == 2 * K);
  for (std::size_t i = 0; i < K; ++i)
    CHECK(pr.transcript.messages[i].tag == MsgTag::UploadMaskedModel);
  for (std::size_t i = K; i < 2 * K; ++i)
    CHECK(pr.transcript.messages[i].tag == MsgTag::MaskedStateResult);

  SUBCASE("optional dispatch commands double the result half") {
    ProtocolOptions opts;
    opts.emit_dispatch_commands = true;
    ProtocolResult pc = run_protocol(s, bf, opts);
    CHECK(pc.transcript.messages.size() == 3 * K);
    CHECK(pc.transcript.messages.back().tag == MsgTag::DispatchCommand);
  }
}

TEST_CASE("upload payload size matches the block shapes") {
  Scenario s = toy();
  BruteForceBackend bf;
  ProtocolResult pr = run_protocol(s, bf);
  REQUIRE_FALSE(pr.aborted);
  const int T = s.horizon;
  const auto& up = pr.transcript.messages.front();
  REQUIRE(up.upload);
  const long reals = up.upload->f1.size() + up.upload->f2.size() +
                     up.upload->f3.size() + up.upload->f4.size();
  CHECK(reals == 6 * T * T + 6 * T * T + 6 * T * 2 * T + 6 * T);
}

TEST_CASE("recovered states verify end to end") {
  Scenario s = toy();
  BruteForceBackend bf;
  ProtocolResult pr = run_protocol(s, bf);
  REQUIRE_FALSE(pr.aborted);
  for (const auto& [id, rep] : pr.verification) {
    CAPTURE(id);
    CHECK(rep.pass);
  }
}

TEST_CASE("solver failure aborts the protocol") {
  Scenario s = toy();
  // An impossible comfort band cannot be dispatched.
  s.blas[0].temp_hi = 23.0;
  s.blas[0].temp_lo = 23.0;
  s.blas[0].gamma.setConstant(50.0);  // drives x far above any band
  BruteForceBackend bf;
  ProtocolResult pr = run_protocol(s, bf);
  CHECK(pr.aborted);
  CHECK(pr.transcript.messages.back().tag == MsgTag::Abort);
  CHECK(pr.transcript.outcome == pr.abort_reason);
}

TEST_CASE("honest transcript carries no plaintext") {
  Scenario s = toy();
  BruteForceBackend bf;
  int dirty_runs = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Scenario run = s;
    run.seed = seed;
    ProtocolResult pr = run_protocol(run, bf);
    REQUIRE_FALSE(pr.aborted);
    LeakageReport rep = inspect_transcript(pr.transcript, secrets_for(run, pr, false));
    if (!rep.clean()) ++dirty_runs;
  }
  CHECK(dirty_runs == 0);
}

TEST_CASE("identity keys leak and the scan catches it") {
  Scenario s = toy();
  BruteForceBackend bf;
  ProtocolOptions opts;
  opts.force_identity_keys = true;
  ProtocolResult pr = run_protocol(s, bf, opts);
  REQUIRE_FALSE(pr.aborted);
  LeakageReport rep = inspect_transcript(pr.transcript, secrets_for(s, pr, true));
  CHECK(rep.matches.size() >= 1);
}

TEST_CASE("transcript views and collusion union") {
  Scenario s = toy();
  BruteForceBackend bf;
  ProtocolResult pr = run_protocol(s, bf);
  REQUIRE_FALSE(pr.aborted);

  ProtocolTranscript bla_view = pr.transcript.view("toybla");
  CHECK(bla_view.messages.size() == 2);  // its upload + its result
  ProtocolTranscript dso_view = pr.transcript.view("dso");
  CHECK(dso_view.messages.size() == pr.transcript.messages.size());

  // Colluding DSO + BLA still finds nothing in an honest run.
  LeakageReport rep = inspect_transcript(dso_view, secrets_for(s, pr, false));
  CHECK(rep.clean());
}

TEST_CASE("transcript log export") {
  Scenario s = toy();
  BruteForceBackend bf;
  ProtocolResult pr = run_protocol(s, bf);
  REQUIRE_FALSE(pr.aborted);
  std::ostringstream os;
  pr.transcript.write_log(os);
  CHECK(os.str().find("upload_masked_model") != std::string::npos);
  CHECK(os.str().find("masked_state_result") != std::string::npos);
  CHECK(os.str().find("# outcome: optimal") != std::string::npos);

  std::ostringstream debug;
  pr.transcript.write_log(debug, true);
  CHECK(debug.str().find("x_tilde") != std::string::npos);
}
