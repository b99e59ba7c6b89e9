#include "jumplab.h"

#include "jumplab/errors.hpp"
#include "jumplab/runner.hpp"

#include <algorithm>
#include <new>
#include <string>

struct jl_config {
    jumplab::RunConfig cfg;
};

namespace {

thread_local std::string t_error;
thread_local std::string t_value;

template <class Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        t_error.clear();
        return JL_OK;
    } catch (const jumplab::input_error& e) {
        t_error = e.what();
        return JL_INPUT_ERROR;
    } catch (const jumplab::refusal& e) {
        t_error = e.what();
        return JL_REFUSAL;
    } catch (const std::exception& e) {
        t_error = e.what();
        return JL_INTERNAL;
    }
}

} // namespace

extern "C" {

const char* jl_version(void) { return jumplab::version_string(); }

jl_config* jl_config_new(void) { return new (std::nothrow) jl_config(); }

void jl_config_free(jl_config* cfg) { delete cfg; }

int jl_config_load(jl_config* cfg, const char* path) {
    if (!cfg || !path) {
        t_error = "null argument";
        return JL_INPUT_ERROR;
    }
    return guarded([&] { jumplab::load_config_file(cfg->cfg, path); });
}

int jl_config_set(jl_config* cfg, const char* assignment) {
    if (!cfg || !assignment) {
        t_error = "null argument";
        return JL_INPUT_ERROR;
    }
    return guarded([&] { jumplab::apply_override(cfg->cfg, assignment); });
}

const char* jl_config_get(const jl_config* cfg, const char* key) {
    if (!cfg || !key) {
        t_error = "null argument";
        return nullptr;
    }
    int rc = guarded([&] { t_value = jumplab::config_get(cfg->cfg, key); });
    return rc == JL_OK ? t_value.c_str() : nullptr;
}

const char* jl_config_help(void) {
    static const std::string text = [] {
        size_t width = 0;
        for (const auto& k : jumplab::config_keys())
            width = std::max(width, k.key.size() + k.type.size() + 3);
        std::string out;
        for (const auto& k : jumplab::config_keys()) {
            std::string head = k.key + " (" + k.type + ")";
            out += "  " + head + std::string(width + 2 - head.size(), ' ') + k.help + "\n";
        }
        return out;
    }();
    return text.c_str();
}

int jl_run(const jl_config* cfg, const char* command) {
    if (!cfg || !command) {
        t_error = "null argument";
        return JL_INPUT_ERROR;
    }
    return guarded([&] { jumplab::run_command(command, cfg->cfg); });
}

const char* jl_last_error(void) { return t_error.c_str(); }

} // extern "C"
