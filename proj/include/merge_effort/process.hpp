#pragma once

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

extern char** environ;

namespace merge_effort {

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;

    bool ok() const { return exit_code == 0; }
};

namespace detail {

// Unlinked temp file; survives only as an open descriptor.
class ScratchFile {
public:
    ScratchFile() {
        std::string tmpl =
            (std::filesystem::temp_directory_path() / "me-scratch-XXXXXX").string();
        fd_ = ::mkstemp(tmpl.data());
        if (fd_ < 0)
            throw std::system_error(errno, std::generic_category(), "mkstemp");
        ::unlink(tmpl.c_str());
    }
    ScratchFile(const ScratchFile&) = delete;
    ScratchFile& operator=(const ScratchFile&) = delete;
    ~ScratchFile() {
        if (fd_ >= 0) ::close(fd_);
    }

    int fd() const { return fd_; }

    void fill(std::string_view bytes) {
        std::size_t done = 0;
        while (done < bytes.size()) {
            ssize_t n = ::write(fd_, bytes.data() + done, bytes.size() - done);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw std::system_error(errno, std::generic_category(), "write");
            }
            done += static_cast<std::size_t>(n);
        }
        ::lseek(fd_, 0, SEEK_SET);
    }

    std::string drain() {
        ::lseek(fd_, 0, SEEK_SET);
        std::string out;
        char buf[65536];
        for (;;) {
            ssize_t n = ::read(fd_, buf, sizeof buf);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw std::system_error(errno, std::generic_category(), "read");
            }
            if (n == 0) break;
            out.append(buf, static_cast<std::size_t>(n));
        }
        return out;
    }

private:
    int fd_ = -1;
};

}  // namespace detail

// Runs a program and captures both streams.  All child I/O goes through
// unlinked temp files, so arbitrarily large outputs cannot deadlock the way
// pipe-based capture can.  `extra_env` entries ("KEY=VALUE") override the
// inherited environment.
inline CommandResult run_command(const std::vector<std::string>& argv,
                                 std::string_view stdin_bytes = {},
                                 const std::vector<std::string>& extra_env = {}) {
    if (argv.empty()) throw std::invalid_argument("run_command: empty argv");

    detail::ScratchFile in_file, out_file, err_file;
    in_file.fill(stdin_bytes);

    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const auto& arg : argv) cargv.push_back(const_cast<char*>(arg.c_str()));
    cargv.push_back(nullptr);

    // Merge the environment up front; duplicated keys in envp are
    // implementation-defined, so overrides must replace, not append.
    std::vector<std::string> env_store;
    for (char** e = environ; *e != nullptr; ++e) {
        std::string_view entry(*e);
        std::string_view key = entry.substr(0, entry.find('='));
        bool overridden = false;
        for (const auto& extra : extra_env) {
            if (std::string_view(extra).substr(0, key.size()) == key &&
                extra.size() > key.size() && extra[key.size()] == '=') {
                overridden = true;
                break;
            }
        }
        if (!overridden) env_store.emplace_back(entry);
    }
    env_store.insert(env_store.end(), extra_env.begin(), extra_env.end());
    std::vector<char*> cenv;
    cenv.reserve(env_store.size() + 1);
    for (const auto& e : env_store) cenv.push_back(const_cast<char*>(e.c_str()));
    cenv.push_back(nullptr);

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_file.fd(), STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_file.fd(), STDOUT_FILENO);
    posix_spawn_file_actions_adddup2(&actions, err_file.fd(), STDERR_FILENO);

    pid_t pid = -1;
    int rc = ::posix_spawnp(&pid, argv[0].c_str(), &actions, nullptr,
                            cargv.data(), cenv.data());
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0)
        throw std::system_error(rc, std::generic_category(),
                                "posix_spawnp: " + argv[0]);

    int status = 0;
    for (;;) {
        if (::waitpid(pid, &status, 0) >= 0) break;
        if (errno != EINTR)
            throw std::system_error(errno, std::generic_category(), "waitpid");
    }

    CommandResult result;
    if (WIFEXITED(status))
        result.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        result.exit_code = 128 + WTERMSIG(status);
    result.out = out_file.drain();
    result.err = err_file.drain();
    return result;
}

}  // namespace merge_effort
