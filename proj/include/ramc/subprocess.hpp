#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <unistd.h>

#include <boost/process.hpp>

namespace ramc::subprocess {

struct Result {
    std::string out, err;
    int exit_status = -1;
    bool timed_out = false;
    bool launch_failed = false;
    std::string error_text;
};

namespace detail {

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Scratch directory removed on scope exit.
struct ScratchDir {
    std::filesystem::path path;
    ScratchDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("ramc-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
                std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
        std::filesystem::create_directories(path);
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;
};

}  // namespace detail

/// Runs `program args... script_file` with the script written to a scratch
/// file and stdin empty. Output is captured through files so a chatty
/// child never blocks on a full pipe. The child is killed at the timeout.
inline Result run(const std::string& program, const std::vector<std::string>& args, const std::string& script,
                  std::chrono::seconds timeout) {
    namespace bp = boost::process;
    Result r;
    boost::filesystem::path exe = program;
    if (program.find('/') == std::string::npos) {
        exe = bp::search_path(program);
        if (exe.empty()) {
            r.launch_failed = true;
            r.error_text = "not found on PATH";
            return r;
        }
    } else if (!boost::filesystem::exists(exe)) {
        r.launch_failed = true;
        r.error_text = "no such file";
        return r;
    }

    detail::ScratchDir scratch;
    const auto script_path = scratch.path / "case.gp";
    const auto out_path = scratch.path / "stdout.txt";
    const auto err_path = scratch.path / "stderr.txt";
    {
        std::ofstream s(script_path, std::ios::binary);
        s << script;
    }
    std::vector<std::string> argv = args;
    argv.push_back(script_path.string());

    std::error_code ec;
    bp::child child(exe, bp::args(argv), bp::std_in < bp::null, bp::std_out > out_path.string(), bp::std_err > err_path.string(), ec);
    if (ec) {
        r.launch_failed = true;
        r.error_text = ec.message();
        return r;
    }
    if (!child.wait_for(timeout, ec)) {
        r.timed_out = true;
        child.terminate(ec);
    }
    if (!r.timed_out) r.exit_status = child.exit_code();
    r.out = detail::slurp(out_path);
    r.err = detail::slurp(err_path);
    return r;
}

}  // namespace ramc::subprocess
