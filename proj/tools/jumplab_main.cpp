// jumplab: batch pipeline driver. Thin shell over the C API; all behavior
// lives in the library so other frontends can reuse it.

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "jumplab.h"

int main(int argc, char** argv) {
    CLI::App app{"jumplab — price-jump / news / collective-dynamics pipeline"};
    app.set_version_flag("--version", jl_version());

    std::string command, config_path, out_dir;
    std::vector<std::string> overrides;
    bool list_keys = false;

    app.add_option("command", command,
                   "synth | ingest | detect-jumps | event-study | collective | taildep | report");
    app.add_option("-c,--config", config_path, "sectioned key=value config file");
    app.add_option("-s,--set", overrides, "override one parameter, section.key=value (repeatable)")
        ->type_name("KEY=VALUE");
    app.add_option("-o,--out", out_dir, "output directory (same as --set paths.out=DIR)");
    app.add_flag("--keys", list_keys, "list every parameter with its type and help, then exit");
    app.footer("Environment: JUMPLAB_THREADS caps worker threads.\n"
               "Exit status: 0 ok, 1 input error, 2 analysis refusal.");

    CLI11_PARSE(app, argc, argv);

    jl_config* cfg = jl_config_new();
    if (!cfg) {
        std::fputs("jumplab: out of memory\n", stderr);
        return JL_INTERNAL;
    }

    if (list_keys) {
        std::fputs("parameters, addressable as --set section.key=value:\n", stdout);
        std::fputs(jl_config_help(), stdout);
        jl_config_free(cfg);
        return JL_OK;
    }
    if (command.empty()) {
        std::fputs(app.help().c_str(), stderr);
        jl_config_free(cfg);
        return JL_INPUT_ERROR;
    }

    int rc = JL_OK;
    if (!config_path.empty()) rc = jl_config_load(cfg, config_path.c_str());
    for (const std::string& ov : overrides)
        if (rc == JL_OK) rc = jl_config_set(cfg, ov.c_str());
    if (rc == JL_OK && !out_dir.empty())
        rc = jl_config_set(cfg, ("paths.out=" + out_dir).c_str());
    if (rc == JL_OK) rc = jl_run(cfg, command.c_str());

    if (rc != JL_OK) std::fprintf(stderr, "jumplab: %s\n", jl_last_error());
    jl_config_free(cfg);
    return rc;
}
