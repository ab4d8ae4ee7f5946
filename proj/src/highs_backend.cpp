#include "ppdispatch/highs_backend.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ppd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kBig = 1e30;  // json-safe stand-in for +-inf

double clamp_inf(double v) {
  if (v > kBig) return kBig;
  if (v < -kBig) return -kBig;
  return v;
}

std::string default_worker_path() {
  if (const char* env = std::getenv("PPDISPATCH_WORKER"); env && *env)
    return env;
  std::error_code ec;
  fs::path exe = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) {
    fs::path beside = exe.parent_path() / "highs_worker.py";
    if (fs::exists(beside, ec)) return beside.string();
  }
#ifdef PPD_WORKER_SOURCE_PATH
  return PPD_WORKER_SOURCE_PATH;
#else
  return "highs_worker.py";
#endif
}

}  // namespace

struct HighsProcessBackend::Process {
  pid_t pid = -1;
  int to_child = -1;    // write end
  int from_child = -1;  // read end
  std::string buffer;

  ~Process() {
    if (to_child >= 0) {
      const char* quit = "QUIT\n";
      ssize_t ignored = write(to_child, quit, strlen(quit));
      (void)ignored;
      close(to_child);
    }
    if (from_child >= 0) close(from_child);
    if (pid > 0) {
      int status = 0;
      if (waitpid(pid, &status, WNOHANG) == 0) {
        kill(pid, SIGTERM);
        waitpid(pid, &status, 0);
      }
    }
  }

  bool send_line(const std::string& line) {
    std::string msg = line + "\n";
    const char* p = msg.data();
    std::size_t left = msg.size();
    while (left > 0) {
      ssize_t w = write(to_child, p, left);
      if (w < 0) {
        if (errno == EINTR) continue;
        return false;
      }
      p += w;
      left -= static_cast<std::size_t>(w);
    }
    return true;
  }

  // Reads one line, waiting up to timeout_s. Empty string on EOF/timeout.
  std::string read_line(double timeout_s) {
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
    for (;;) {
      auto nl = buffer.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        return line;
      }
      const auto now = std::chrono::steady_clock::now();
      if (now >= deadline) return "";
      const int wait_ms = static_cast<int>(
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
      pollfd pfd{from_child, POLLIN, 0};
      const int pr = poll(&pfd, 1, std::max(wait_ms, 1));
      if (pr <= 0) {
        if (pr == 0) return "";
        if (errno == EINTR) continue;
        return "";
      }
      char chunk[4096];
      const ssize_t n = read(from_child, chunk, sizeof(chunk));
      if (n <= 0) return "";
      buffer.append(chunk, static_cast<std::size_t>(n));
    }
  }
};

HighsProcessBackend::HighsProcessBackend(std::string worker_path)
    : worker_path_(worker_path.empty() ? default_worker_path() : std::move(worker_path)) {
  char tmpl[] = "/tmp/ppdispatch.XXXXXX";
  if (char* dir = mkdtemp(tmpl)) temp_dir_ = dir;
}

HighsProcessBackend::~HighsProcessBackend() {
  shutdown();
  if (!temp_dir_.empty()) {
    std::error_code ec;
    fs::remove_all(temp_dir_, ec);
  }
}

void HighsProcessBackend::shutdown() { proc_.reset(); }

bool HighsProcessBackend::ensure_started() {
  if (proc_) return true;
  int in_pipe[2];   // parent -> child
  int out_pipe[2];  // child -> parent
  if (pipe(in_pipe) != 0) return false;
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    return false;
  }
  const pid_t pid = fork();
  if (pid < 0) {
    for (int f : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(f);
    return false;
  }
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    for (int f : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(f);
    execlp("python3", "python3", worker_path_.c_str(), nullptr);
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  proc_ = std::make_unique<Process>();
  proc_->pid = pid;
  proc_->to_child = in_pipe[1];
  proc_->from_child = out_pipe[0];

  if (!proc_->send_line("PING") || proc_->read_line(30.0) != "PONG") {
    shutdown();
    return false;
  }
  return true;
}

bool HighsProcessBackend::available() {
  std::lock_guard<std::mutex> lock(mu_);
  return ensure_started();
}

SolverResult HighsProcessBackend::solve(const MilpProblem& p,
                                        const SolveOptions& opts) {
  std::lock_guard<std::mutex> lock(mu_);
  SolverResult res;
  const auto t0 = std::chrono::steady_clock::now();

  if (!ensure_started()) {
    res.status = SolveStatus::Error;
    res.message = "highs worker unavailable (" + worker_path_ + ")";
    return res;
  }

  json req;
  req["num_vars"] = p.num_vars();
  {
    std::vector<double> obj(static_cast<std::size_t>(p.num_vars()), 0.0);
    for (const auto& [v, c] : p.objective()) obj[static_cast<std::size_t>(v)] = c;
    req["obj"] = obj;
  }
  {
    std::vector<double> lb, ub;
    std::vector<int> integrality;
    lb.reserve(static_cast<std::size_t>(p.num_vars()));
    for (const auto& v : p.vars()) {
      lb.push_back(clamp_inf(v.lb));
      ub.push_back(clamp_inf(v.ub));
      integrality.push_back(v.kind == VarKind::Binary ? 1 : 0);
    }
    req["lb"] = lb;
    req["ub"] = ub;
    req["integrality"] = integrality;
  }
  {
    std::vector<int> rows, cols;
    std::vector<double> vals, rlb, rub;
    for (int i = 0; i < p.num_rows(); ++i) {
      const auto& r = p.row(i);
      for (const auto& [v, c] : r.coeffs) {
        rows.push_back(i);
        cols.push_back(v);
        vals.push_back(c);
      }
      switch (r.sense) {
        case Sense::LE:
          rlb.push_back(-kBig);
          rub.push_back(r.rhs);
          break;
        case Sense::GE:
          rlb.push_back(r.rhs);
          rub.push_back(kBig);
          break;
        case Sense::EQ:
          rlb.push_back(r.rhs);
          rub.push_back(r.rhs);
          break;
      }
    }
    req["a_rows"] = rows;
    req["a_cols"] = cols;
    req["a_vals"] = vals;
    req["row_lb"] = rlb;
    req["row_ub"] = rub;
  }
  req["gap"] = opts.rel_gap;
  req["time_limit"] = opts.time_limit;
  req["seed"] = opts.seed;  // carried for replay bookkeeping

  const std::string base = temp_dir_ + "/r" + std::to_string(request_counter_++);
  const std::string req_path = base + ".req.json";
  const std::string resp_path = base + ".resp.json";
  {
    std::ofstream out(req_path);
    out << req.dump();
  }

  if (!proc_->send_line("SOLVE " + req_path + " " + resp_path)) {
    shutdown();
    res.status = SolveStatus::Error;
    res.message = "highs worker pipe broken";
    return res;
  }
  const std::string reply = proc_->read_line(opts.time_limit + 120.0);
  if (reply.rfind("DONE ", 0) != 0) {
    res.status = SolveStatus::Error;
    res.message = reply.empty() ? "highs worker timed out or died" : reply;
    if (reply.empty()) shutdown();
    return res;
  }

  json resp;
  {
    std::ifstream in(resp_path);
    in >> resp;
  }
  std::error_code ec;
  fs::remove(req_path, ec);
  fs::remove(resp_path, ec);

  const int status = resp.value("status", 4);
  switch (status) {
    case 0: res.status = SolveStatus::Optimal; break;
    case 1: res.status = SolveStatus::Limit; break;
    case 2: res.status = SolveStatus::Infeasible; break;
    case 3: res.status = SolveStatus::Unbounded; break;
    default: res.status = SolveStatus::Error; break;
  }
  res.message = resp.value("message", "");
  res.gap = resp.value("gap", 0.0);
  if (resp.contains("x")) {
    const auto& xv = resp["x"];
    res.x.resize(static_cast<Eigen::Index>(xv.size()));
    for (std::size_t i = 0; i < xv.size(); ++i)
      res.x(static_cast<Eigen::Index>(i)) = xv[i].get<double>();
    res.objective = resp.value("objective", 0.0);
  }
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace ppd
