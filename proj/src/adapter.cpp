#include <sys/wait.h>
#include <unistd.h>

#include <csignal>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "icr/errors.hpp"
#include "icr/harness.hpp"

namespace icr::harness {

namespace {

void substitute(std::string& text, const std::string& slot,
                const std::string& value) {
  for (std::size_t pos = text.find(slot); pos != std::string::npos;
       pos = text.find(slot, pos + value.size())) {
    text.replace(pos, slot.size(), value);
  }
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += "'";
  return out;
}

}  // namespace

ExternalProcessAgent::ExternalProcessAgent(std::string command_template,
                                           std::filesystem::path io_dir,
                                           double seconds_per_step)
    : command_template_(std::move(command_template)),
      io_dir_(std::move(io_dir)),
      seconds_per_step_(seconds_per_step) {
  std::filesystem::create_directories(io_dir_);
}

std::string ExternalProcessAgent::tag() const {
  return "exec:" + command_template_;
}

RunRecord ExternalProcessAgent::run(const RunSpec& spec,
                                    const InstructionSequence& instructions) {
  (void)instructions;  // the external process reads the file named in spec
  const int episode = episode_++;
  const std::filesystem::path spec_path =
      io_dir_ / ("spec_" + std::to_string(episode) + ".json");
  const std::filesystem::path record_path =
      io_dir_ / ("record_" + std::to_string(episode) + ".json");
  std::filesystem::remove(record_path);

  {
    std::ofstream out(spec_path, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot write " + spec_path.string());
    }
    out << run_spec_to_json(spec);
  }

  std::string command = command_template_;
  const bool has_slots = command.find("{spec}") != std::string::npos ||
                         command.find("{record}") != std::string::npos;
  substitute(command, "{spec}", shell_quote(spec_path.string()));
  substitute(command, "{record}", shell_quote(record_path.string()));
  if (!has_slots) {
    command += " " + shell_quote(spec_path.string()) + " " +
               shell_quote(record_path.string());
  }

  const auto start = std::chrono::steady_clock::now();
  const auto deadline =
      start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                  std::chrono::duration<double>(spec.timeout_steps *
                                                seconds_per_step_));

  const pid_t pid = fork();
  if (pid < 0) {
    throw AdapterProtocolError("fork failed");
  }
  if (pid == 0) {
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }

  int status = 0;
  bool timed_out = false;
  for (;;) {
    const pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0) {
      throw AdapterProtocolError("waitpid failed");
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      timed_out = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  if (timed_out) {
    RunRecord record;
    record.spec = spec;
    record.termination = Termination::Timeout;
    record.wall_time = wall;
    return record;
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw AdapterProtocolError("agent command failed (status " +
                               std::to_string(WIFEXITED(status)
                                                  ? WEXITSTATUS(status)
                                                  : -1) +
                               "): " + command);
  }

  std::ifstream in(record_path, std::ios::binary);
  if (!in) {
    throw AdapterProtocolError("agent wrote no record file: " +
                               record_path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  RunRecord record;
  try {
    record = record_from_json_line(buf.str(), record_path.filename().string());
  } catch (const ParseError& e) {
    throw AdapterProtocolError(std::string("malformed record file: ") + e.what());
  }
  record.spec = spec;
  record.wall_time = wall;
  return record;
}

}  // namespace icr::harness
