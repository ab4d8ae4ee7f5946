#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ppdispatch/dispatch.hpp"
#include "ppdispatch/scenario.hpp"

namespace ppd {

enum class MsgTag { UploadMaskedModel, MaskedStateResult, DispatchCommand, Abort };

std::string to_string(MsgTag t);

/// One message on the simulated channel. Payload fields are populated
/// according to the tag; everything is immutable once recorded.
struct ProtocolMessage {
  int time = 0;  // logical clock
  std::string sender;
  std::string receiver;
  MsgTag tag = MsgTag::Abort;
  std::shared_ptr<const MaskedBla> upload;  // UploadMaskedModel
  std::shared_ptr<const Vec> x_tilde;       // MaskedStateResult
  std::shared_ptr<const Vec> u;             // MaskedStateResult / DispatchCommand
  std::string note;                         // Abort reason
  std::uint64_t payload_digest = 0;
};

/// Ordered, replayable record of a protocol run. The eavesdropper tap is
/// exactly this object: a passive copy of every message.
struct ProtocolTranscript {
  std::vector<ProtocolMessage> messages;
  std::map<std::string, std::uint64_t> actor_seeds;
  std::string outcome;

  std::uint64_t hash() const;
  /// Messages visible to one actor (sender or receiver).
  ProtocolTranscript view(const std::string& actor) const;
  /// Line-delimited export: time, sender, receiver, tag, digest and, in
  /// debug mode, the payload values.
  void write_log(std::ostream& os, bool include_payloads = false) const;
};

struct ProtocolOptions {
  /// Replaces every key with the identity; the negative control for the
  /// leakage scan.
  bool force_identity_keys = false;
  /// Also emit one DispatchCommand per BLA after the result distribution.
  bool emit_dispatch_commands = false;
};

struct ProtocolResult {
  bool aborted = false;
  std::string abort_reason;
  SolverResult dso_result;
  DispatchSolution solution;
  std::map<std::string, Vec> recovered_x;
  std::map<std::string, FeasibilityReport> verification;
  ProtocolTranscript transcript;
};

/// Runs the full exchange: every BLA generates keys and uploads its masked
/// blocks, the DSO assembles and solves the masked dispatch, distributes
/// the masked states and controls, and each BLA recovers its real state.
/// Solver failure aborts the run with one Abort message per BLA.
ProtocolResult run_protocol(const Scenario& s, SolverBackend& backend,
                            const ProtocolOptions& opts = {});

/// Plaintext artifacts held by the auditor when scanning a transcript.
struct BlaSecrets {
  CompactBla compact;
  MaskingKeys keys;
  Vec x_true;  // may be empty when unknown
};

struct LeakageMatch {
  std::size_t message_index = 0;
  std::string payload_part;
  std::string secret;
  std::string bla_id;
  double distance = 0.0;
};

struct LeakageReport {
  std::vector<LeakageMatch> matches;
  bool clean() const { return matches.empty(); }
};

/// Scans every payload for rows, vector blocks or scalars that match a
/// secret within 1e-9.
LeakageReport inspect_transcript(const ProtocolTranscript& t,
                                 const std::map<std::string, BlaSecrets>& secrets);

}  // namespace ppd
