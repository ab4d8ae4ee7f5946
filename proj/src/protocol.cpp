#include "ppdispatch/protocol.hpp"

#include <ostream>

namespace ppd {

namespace {

constexpr const char* kDso = "dso";

std::uint64_t digest_of(const ProtocolMessage& m) {
  Digest d;
  d.update(m.sender);
  d.update(m.receiver);
  d.update(static_cast<std::uint64_t>(m.tag));
  if (m.upload) {
    d.update(m.upload->id);
    d.update(m.upload->f1);
    d.update(m.upload->f2);
    d.update(m.upload->f3);
    d.update(m.upload->f4);
  }
  if (m.x_tilde) d.update(*m.x_tilde);
  if (m.u) d.update(*m.u);
  d.update(m.note);
  return d.value();
}

class Recorder {
 public:
  explicit Recorder(ProtocolTranscript& t) : t_(t) {}

  void record(ProtocolMessage m) {
    m.time = clock_++;
    m.payload_digest = digest_of(m);
    t_.messages.push_back(std::move(m));
  }

 private:
  ProtocolTranscript& t_;
  int clock_ = 0;
};

MaskingKeys identity_keys(int T, int duplication) {
  MaskingKeys k;
  k.W = Mat::Identity(T, T);
  k.e_diag = Vec::Ones(2 * T);
  k.V = Mat::Identity(3 * duplication * T, 3 * duplication * T);
  k.duplication = duplication;
  k.seed = 0;
  return k;
}

void write_vec(std::ostream& os, const Vec& v) {
  os << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i)
    os << (i ? "," : "") << v(i);
  os << "]";
}

}  // namespace

std::string to_string(MsgTag t) {
  switch (t) {
    case MsgTag::UploadMaskedModel: return "upload_masked_model";
    case MsgTag::MaskedStateResult: return "masked_state_result";
    case MsgTag::DispatchCommand: return "dispatch_command";
    case MsgTag::Abort: return "abort";
  }
  return "unknown";
}

std::uint64_t ProtocolTranscript::hash() const {
  Digest d;
  for (const auto& m : messages) {
    d.update(static_cast<std::uint64_t>(m.time));
    d.update(m.sender);
    d.update(m.receiver);
    d.update(static_cast<std::uint64_t>(m.tag));
    d.update(m.payload_digest);
  }
  d.update(outcome);
  return d.value();
}

ProtocolTranscript ProtocolTranscript::view(const std::string& actor) const {
  ProtocolTranscript out;
  out.outcome = outcome;
  auto it = actor_seeds.find(actor);
  if (it != actor_seeds.end()) out.actor_seeds.emplace(*it);
  for (const auto& m : messages)
    if (m.sender == actor || m.receiver == actor) out.messages.push_back(m);
  return out;
}

void ProtocolTranscript::write_log(std::ostream& os, bool include_payloads) const {
  for (const auto& m : messages) {
    os << m.time << "\t" << m.sender << "\t" << m.receiver << "\t"
       << to_string(m.tag) << "\t";
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(m.payload_digest));
    os << buf;
    if (include_payloads) {
      os << "\t";
      if (m.upload) {
        os << "{\"f1_rows\":" << m.upload->f1.rows()
           << ",\"f4\":";
        write_vec(os, m.upload->f4);
        os << "}";
      } else if (m.x_tilde || m.u) {
        os << "{";
        if (m.x_tilde) {
          os << "\"x_tilde\":";
          write_vec(os, *m.x_tilde);
        }
        if (m.u) {
          os << (m.x_tilde ? "," : "") << "\"u\":";
          write_vec(os, *m.u);
        }
        os << "}";
      } else {
        os << "{\"note\":\"" << m.note << "\"}";
      }
    }
    os << "\n";
  }
  os << "# outcome: " << outcome << "\n";
}

ProtocolResult run_protocol(const Scenario& s, SolverBackend& backend,
                            const ProtocolOptions& opts) {
  ProtocolResult res;
  Recorder rec(res.transcript);

  GridBlock grid = build_grid_block(s.network, s.horizon);
  CouplingMatrix A = coupling_matrix(s.network, grid.layout);

  // Step 1-3: each BLA prepares keys and uploads its masked model. The
  // coupling order fixes both the seed streams and the message order.
  struct BlaState {
    std::string id;
    CompactBla compact;
    MaskingKeys keys;
  };
  std::vector<BlaState> blas;
  std::vector<MaskedBla> uploads;
  for (std::size_t k = 0; k < A.bla_ids.size(); ++k) {
    const std::string& id = A.bla_ids[k];
    BlaState st;
    st.id = id;
    st.compact = build_compact(s.bla(id));
    const std::uint64_t seed = mix_seed(s.seed, k);
    res.transcript.actor_seeds[id] = seed;
    try {
      st.keys = opts.force_identity_keys
                    ? identity_keys(s.horizon, s.masking.duplication)
                    : generate_keys(s.horizon, seed, s.masking);
    } catch (const KeyGenerationFailure& e) {
      ProtocolMessage abort;
      abort.sender = id;
      abort.receiver = kDso;
      abort.tag = MsgTag::Abort;
      abort.note = e.what();
      rec.record(std::move(abort));
      res.aborted = true;
      res.abort_reason = std::string("key generation failed at ") + id;
      res.transcript.outcome = res.abort_reason;
      return res;
    }
    MaskedBla m = mask(st.compact, st.keys, id);
    auto payload = std::make_shared<MaskedBla>(std::move(m));
    uploads.push_back(*payload);
    ProtocolMessage msg;
    msg.sender = id;
    msg.receiver = kDso;
    msg.tag = MsgTag::UploadMaskedModel;
    msg.upload = payload;
    rec.record(std::move(msg));
    blas.push_back(std::move(st));
  }

  // Step 4: the DSO assembles the masked dispatch and solves it.
  AssembledProblem p1 = assemble_masked(grid, A, uploads);
  res.dso_result = backend.solve(p1.problem, s.solver);
  if (res.dso_result.status != SolveStatus::Optimal) {
    for (const auto& st : blas) {
      ProtocolMessage abort;
      abort.sender = kDso;
      abort.receiver = st.id;
      abort.tag = MsgTag::Abort;
      abort.note = to_string(res.dso_result.status);
      rec.record(std::move(abort));
    }
    res.aborted = true;
    res.abort_reason = "dispatch " + to_string(res.dso_result.status);
    res.transcript.outcome = res.abort_reason;
    return res;
  }
  res.solution = extract_dispatch(res.dso_result, p1.layout, s.network);

  // Steps 5-6: distribute masked states, recover, verify.
  for (const auto& st : blas) {
    auto x_tilde = std::make_shared<Vec>(res.solution.bla_pseudo.at(st.id));
    auto u = std::make_shared<Vec>(res.solution.bla_power.at(st.id));
    ProtocolMessage msg;
    msg.sender = kDso;
    msg.receiver = st.id;
    msg.tag = MsgTag::MaskedStateResult;
    msg.x_tilde = x_tilde;
    msg.u = u;
    rec.record(std::move(msg));
    if (opts.emit_dispatch_commands) {
      ProtocolMessage cmd;
      cmd.sender = kDso;
      cmd.receiver = st.id;
      cmd.tag = MsgTag::DispatchCommand;
      cmd.u = u;
      rec.record(std::move(cmd));
    }

    Vec x = recover_state(*x_tilde, st.keys.W);
    res.verification[st.id] = verify_recovered(st.compact, x, *u, 1e-6);
    res.recovered_x[st.id] = std::move(x);
  }
  res.transcript.outcome = "optimal";
  return res;
}

namespace {

bool rows_close(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  if (a.size() != b.size()) return false;
  if (a.cwiseAbs().maxCoeff() <= 1e-12 || b.cwiseAbs().maxCoeff() <= 1e-12)
    return false;
  return (a - b).cwiseAbs().maxCoeff() <= 1e-9;
}

struct SecretRows {
  std::string bla_id;
  std::string name;
  Mat rows;  // one candidate per row
};

}  // namespace

LeakageReport inspect_transcript(const ProtocolTranscript& t,
                                 const std::map<std::string, BlaSecrets>& secrets) {
  LeakageReport rep;

  std::vector<SecretRows> row_secrets;
  struct SecretVec {
    std::string bla_id, name;
    Vec v;
  };
  std::vector<SecretVec> vec_secrets;
  struct SecretScalar {
    std::string bla_id, name;
    double v;
  };
  std::vector<SecretScalar> scalar_secrets;

  for (const auto& [id, sec] : secrets) {
    const int T = sec.compact.horizon();
    row_secrets.push_back({id, "R", sec.compact.R});
    row_secrets.push_back({id, "S", sec.compact.S});
    if (sec.keys.W.size() > 0) {
      row_secrets.push_back({id, "W", sec.keys.W});
      row_secrets.push_back({id, "-W", -sec.keys.W});
      row_secrets.push_back({id, "V", sec.keys.V});
    }
    vec_secrets.push_back({id, "d", sec.compact.d});
    Vec x_bd(2 * T);
    x_bd.head(T).setConstant(sec.compact.x_hi);
    x_bd.tail(T).setConstant(-sec.compact.x_lo);
    vec_secrets.push_back({id, "x_bd", x_bd});
    if (sec.keys.e_diag.size() > 0) vec_secrets.push_back({id, "E_diag", sec.keys.e_diag});
    if (sec.x_true.size() > 0) vec_secrets.push_back({id, "x", sec.x_true});
    scalar_secrets.push_back({id, "x_hi", sec.compact.x_hi});
    scalar_secrets.push_back({id, "x_lo", sec.compact.x_lo});
  }

  auto scan_matrix = [&](std::size_t mi, const std::string& part, const Mat& m) {
    for (const auto& sr : row_secrets) {
      if (sr.rows.cols() != m.cols()) continue;
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < sr.rows.rows(); ++j)
          if (rows_close(m.row(i), sr.rows.row(j))) {
            rep.matches.push_back({mi, part + " row " + std::to_string(i),
                                   sr.name + " row " + std::to_string(j),
                                   sr.bla_id,
                                   (m.row(i) - sr.rows.row(j)).cwiseAbs().maxCoeff()});
          }
    }
  };
  auto scan_vector = [&](std::size_t mi, const std::string& part, const Vec& v) {
    // Aligned sub-blocks against vector secrets.
    for (const auto& sv : vec_secrets) {
      const Eigen::Index L = sv.v.size();
      if (L == 0 || sv.v.cwiseAbs().maxCoeff() <= 1e-12) continue;
      for (Eigen::Index off = 0; off + L <= v.size(); off += L) {
        if ((v.segment(off, L) - sv.v).cwiseAbs().maxCoeff() <= 1e-9) {
          rep.matches.push_back({mi, part + " block@" + std::to_string(off),
                                 sv.name, sv.bla_id, 0.0});
        }
      }
    }
    for (const auto& ss : scalar_secrets) {
      if (std::abs(ss.v) <= 1e-12) continue;
      for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i) - ss.v) <= 1e-9) {
          rep.matches.push_back({mi, part + " entry " + std::to_string(i),
                                 ss.name, ss.bla_id, std::abs(v(i) - ss.v)});
        }
    }
  };

  for (std::size_t mi = 0; mi < t.messages.size(); ++mi) {
    const auto& m = t.messages[mi];
    if (m.upload) {
      scan_matrix(mi, "f1", m.upload->f1);
      scan_matrix(mi, "f2", m.upload->f2);
      scan_matrix(mi, "f3", m.upload->f3);
      scan_vector(mi, "f4", m.upload->f4);
    }
    if (m.x_tilde) scan_vector(mi, "x_tilde", *m.x_tilde);
    // u is deliberately exchanged in the clear; it is not a secret.
  }
  return rep;
}

}  // namespace ppd
