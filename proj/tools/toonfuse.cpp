// toonfuse command-line front end.
//
// Exit codes: 0 success, 1 I/O or file-format error, 2 invalid flags or
// inputs, 3 numeric failure.

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "toonfuse/checkpoint.hpp"
#include "toonfuse/grid.hpp"
#include "toonfuse/latent_io.hpp"
#include "toonfuse/manifest.hpp"
#include "toonfuse/pipeline.hpp"
#include "toonfuse/png_io.hpp"

namespace fs = std::filesystem;
using namespace toonfuse;
using nlohmann::ordered_json;

namespace {

enum ExitCode { kOk = 0, kIo = 1, kValidation = 2, kNumeric = 3 };

bool g_verbose = false;

void note(const std::string& msg) {
    if (g_verbose) std::cerr << "[toonfuse] " << msg << "\n";
}

// ---- shared option groups ------------------------------------------------------

struct ControlFlags {
    std::optional<std::size_t> m;
    double c = kDefaultCoarseWeight;
    double s = kDefaultFineWeight;
    std::string convention = "extrinsic";

    void attach(CLI::App* cmd) {
        cmd->add_option("--m", m, "Coarse layer cutoff (default: 7 at 18 layers, else the coarse layer count)");
        cmd->add_option("--c", c, "Coarse control weight in [0,1]")->capture_default_str();
        cmd->add_option("--s", s, "Fine control weight in [0,1]")->capture_default_str();
        cmd->add_option("--convention", convention, "Weight convention: extrinsic or age")->capture_default_str();
    }

    ControlWeights build(const GeneratorConfig& cfg) const {
        const std::size_t layers = cfg.layer_count();
        const std::size_t cutoff = m.value_or(default_cutoff(layers, cfg.coarse_layer_count()));
        return make_control_weights(cutoff, c, s, layers, parse_convention(convention));
    }
};

void record_control(ordered_json& params, const ControlWeights& cw) {
    params["m"] = cw.m();
    params["c"] = cw.c();
    params["s"] = cw.s();
    params["convention"] = to_string(cw.convention());
}

struct Context {
    std::string ckpt_path;
    bool null_age = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--ckpt", ckpt_path, "Checkpoint (.tagn)")->required();
        cmd->add_flag("--null-age-encoder", null_age, "Replace the age encoder by zero");
    }
};

struct Loaded {
    Checkpoint ckpt;
    RunManifest manifest;

    const Generator& g() const { return ckpt.generator; }
    const EncoderSet& e() const { return ckpt.encoders; }
    std::size_t resolution() const { return ckpt.generator.config().max_resolution; }

    ImageBuffer image(const std::string& path) {
        manifest.inputs.push_back(digest_file(path));
        ImageBuffer img = read_png(path);
        if (img.height() != resolution() || img.width() != resolution()) {
            note("resampling " + path + " to " + std::to_string(resolution()) + "x" + std::to_string(resolution()));
        }
        return resize_bilinear(img, resolution(), resolution());
    }

    template <class Space>
    LatentRows<Space> latent(const std::string& path) {
        manifest.inputs.push_back(digest_file(path));
        auto lat = load_latent<Space>(path);
        if (lat.rows() != g().layer_count() || lat.dim() != g().latent_dim()) {
            throw ValidationError("latent", path + " is " + std::to_string(lat.rows()) + "x" +
                                                std::to_string(lat.dim()) + ", checkpoint expects " +
                                                std::to_string(g().layer_count()) + "x" +
                                                std::to_string(g().latent_dim()));
        }
        return lat;
    }
};

Loaded load(const Context& ctx, const std::string& command) {
    Loaded l{load_checkpoint(ctx.ckpt_path), {}};
    if (ctx.null_age) l.ckpt.encoders = l.ckpt.encoders.with_null_age();
    l.manifest.command = command;
    l.manifest.inputs.push_back(digest_file(ctx.ckpt_path));
    l.manifest.parameters["null_age_encoder"] = ctx.null_age;
    note("loaded " + ctx.ckpt_path);
    return l;
}

AgeValue parse_age(double years) { return AgeValue(years); }

void emit_image(Loaded& l, const std::string& out, const ImageBuffer& img) {
    write_png(out, img);
    l.manifest.outputs.push_back(digest_file(out));
    write_manifest(out + ".manifest.json", l.manifest);
    note("wrote " + out);
}

void emit_grid(Loaded& l, const std::string& out_dir, const GridResult& grid) {
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    for (std::size_t r = 0; r < grid.rows; ++r) {
        for (std::size_t c = 0; c < grid.cols; ++c) {
            const fs::path cell = dir / ("cell_r" + std::to_string(r) + "_c" + std::to_string(c) + ".png");
            write_png(cell, grid.cell(r, c));
            l.manifest.outputs.push_back(digest_file(cell));
        }
    }
    const fs::path grid_png = dir / "grid.png";
    write_png(grid_png, render_grid(grid));
    l.manifest.outputs.push_back(digest_file(grid_png));
    l.manifest.parameters["row_labels"] = grid.row_labels;
    l.manifest.parameters["col_labels"] = grid.col_labels;
    write_manifest(dir / "manifest.json", l.manifest);
    note("wrote " + std::to_string(grid.cells.size()) + " cells to " + out_dir);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_number(const std::string& text, const std::string& field) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(field, "cannot parse '" + text + "' as a number");
    }
}

/// "a..b" (inclusive integer range) or a comma-separated list.
std::vector<double> parse_values(const std::string& text, const std::string& field) {
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const double lo = parse_number(text.substr(0, dots), field);
        const double hi = parse_number(text.substr(dots + 2), field);
        if (lo != std::floor(lo) || hi != std::floor(hi) || hi < lo) {
            throw ValidationError(field, "range '" + text + "' must be ascending integers a..b");
        }
        std::vector<double> out;
        for (double v = lo; v <= hi; v += 1.0) out.push_back(v);
        return out;
    }
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_number(item, field));
    if (out.empty()) throw ValidationError(field, "no values given");
    return out;
}

// ---- commands --------------------------------------------------------------------

struct InitCmd {
    std::string out;
    GeneratorConfig cfg;
    std::uint32_t encoder_channels = kDefaultEncoderChannels;
    bool null_age = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--out", out, "Output checkpoint path")->required();
        cmd->add_option("--max-res", cfg.max_resolution, "Output resolution (power of two, 8..1024)")
            ->capture_default_str();
        cmd->add_option("--seed", cfg.seed, "Initialisation seed")->capture_default_str();
        cmd->add_option("--channel-base", cfg.channel_base)->capture_default_str();
        cmd->add_option("--channel-max", cfg.channel_max)->capture_default_str();
        cmd->add_option("--latent-dim", cfg.latent_dim, "Latent width D")->capture_default_str();
        cmd->add_option("--coarse-max-res", cfg.coarse_max_resolution)->capture_default_str();
        cmd->add_option("--encoder-channels", encoder_channels)->capture_default_str();
        cmd->add_flag("--null-age-encoder", null_age, "Store no age encoder (E_age := 0)");
    }

    int run() const {
        cfg.validate();
        Checkpoint ckpt = make_checkpoint(cfg, encoder_channels);
        if (null_age) ckpt.encoders = ckpt.encoders.with_null_age();
        save_checkpoint(out, ckpt);
        RunManifest m;
        m.command = "init";
        m.parameters = {{"max_resolution", cfg.max_resolution}, {"base_resolution", cfg.base_resolution},
                        {"channel_base", cfg.channel_base},     {"channel_max", cfg.channel_max},
                        {"latent_dim", cfg.latent_dim},         {"seed", cfg.seed},
                        {"coarse_max_resolution", cfg.coarse_max_resolution},
                        {"encoder_channels", encoder_channels}, {"null_age_encoder", null_age},
                        {"layers", cfg.layer_count()}};
        m.outputs.push_back(digest_file(out));
        write_manifest(out + ".manifest.json", m);
        note("wrote " + out + " (L=" + std::to_string(cfg.layer_count()) + ")");
        return kOk;
    }
};

struct InspectCmd {
    std::string ckpt;
    std::string latent;

    void attach(CLI::App* cmd) {
        cmd->add_option("--ckpt", ckpt, "Checkpoint (.tagn)");
        cmd->add_option("--latent", latent, "Latent file (.lat)");
    }

    int run() const {
        if (ckpt.empty() && latent.empty()) throw ValidationError("ckpt", "give --ckpt and/or --latent");
        if (!ckpt.empty()) {
            const CheckpointSummary s = summarize_checkpoint(read_file(ckpt));
            const GeneratorConfig& c = s.config;
            c.validate();
            std::cout << "checkpoint " << ckpt << " (version " << s.version << ")\n"
                      << "max_resolution " << c.max_resolution << "\n"
                      << "base_resolution " << c.base_resolution << "\n"
                      << "channel_base " << c.channel_base << "\n"
                      << "channel_max " << c.channel_max << "\n"
                      << "latent_dim " << c.latent_dim << "\n"
                      << "seed " << c.seed << "\n"
                      << "coarse_max_resolution " << c.coarse_max_resolution << "\n"
                      << "L=" << c.layer_count() << "\n"
                      << "coarse_layers " << c.coarse_layer_count() << "\n"
                      << "default_m " << default_cutoff(c.layer_count(), c.coarse_layer_count()) << "\n"
                      << "layers:\n";
            for (std::size_t k = 0; k < c.layer_count(); ++k) {
                const auto res = c.layer_resolution(k);
                std::cout << "  " << (k + 1) << " res=" << res << " channels=" << c.channels_at(res) << " "
                          << (c.is_coarse(k) ? "coarse" : "fine") << "\n";
            }
            std::cout << "tensors " << s.tensors.size() << ":\n";
            for (const auto& t : s.tensors) {
                std::cout << "  " << t.name << " [";
                for (std::size_t i = 0; i < t.shape.size(); ++i) std::cout << (i ? "," : "") << t.shape[i];
                std::cout << "]\n";
            }
        }
        if (!latent.empty()) {
            const LatentBlock b = decode_latent(read_file(latent));
            std::cout << "latent " << latent << " L=" << b.rows << " D=" << b.dim << "\n";
        }
        return kOk;
    }
};

struct ReageCmd {
    Context ctx;
    std::string input, out;
    double age = 0.0;

    void attach(CLI::App* cmd) {
        ctx.attach(cmd);
        cmd->add_option("--input", input, "Input face (PNG)")->required();
        cmd->add_option("--age", age, "Target age in [0,100]")->required();
        cmd->add_option("--out", out, "Output PNG")->required();
    }

    int run() {
        const AgeValue a = parse_age(age);
        Loaded l = load(ctx, "reage");
        const ImageBuffer x = l.image(input);
        l.manifest.parameters["age"] = a.years();
        emit_image(l, out, sam_reage(l.g(), l.e(), x, a));
        return kOk;
    }
};

struct StylizeCmd {
    Context ctx;
    ControlFlags control;
    std::string input, style, out;

    void attach(CLI::App* cmd) {
        ctx.attach(cmd);
        control.attach(cmd);
        cmd->add_option("--input", input, "Input face (PNG)")->required();
        cmd->add_option("--style", style, "Style exemplar (PNG)")->required();
        cmd->add_option("--out", out, "Output PNG")->required();
    }

    int run() {
        parse_convention(control.convention);
        Loaded l = load(ctx, "stylize");
        const ControlWeights cw = control.build(l.g().config());
        const ImageBuffer x = l.image(input);
        const ImageBuffer s = l.image(style);
        record_control(l.manifest.parameters, cw);
        emit_image(l, out, dual_style_transfer(l.g(), l.e(), x, s, cw));
        return kOk;
    }
};

/// Flags shared by every command that runs the combined pipeline.
struct RequestFlags {
    ControlFlags control;
    std::string input, style, style_latent, input_latent, age_ref;
    std::optional<double> age;
    bool adaptive = false;
    bool prefer_ref = false;
    std::uint64_t seed = 0;

    void attach(CLI::App* cmd, bool with_style, bool with_input = true) {
        control.attach(cmd);
        if (with_input) cmd->add_option("--input", input, "Input face (PNG)")->required();
        if (with_style) {
            cmd->add_option("--style", style, "Style exemplar (PNG)");
            cmd->add_option("--style-latent", style_latent, "Precomputed Z+ style latent (.lat)");
        }
        cmd->add_option("--input-latent", input_latent, "Precomputed W+ reconstruction latent (.lat)");
        cmd->add_option("--age", age, "Target age in [0,100]");
        cmd->add_option("--age-ref", age_ref, "Age reference image (PNG)");
        cmd->add_flag("--prefer-age-ref", prefer_ref, "Let --age-ref override --age");
        cmd->add_flag("--adaptive", adaptive, "Adaptive age control");
        cmd->add_option("--seed", seed, "Run seed")->capture_default_str();
    }

    void validate_flags() const {
        parse_convention(control.convention);
        if (age) parse_age(*age);
        if (age && !age_ref.empty() && !prefer_ref) {
            throw ValidationError("age-ref", "--age and --age-ref both given; add --prefer-age-ref to use the reference");
        }
    }

    ToonAgingRequest build(Loaded& l, bool need_age = true) const {
        ToonAgingRequest req;
        req.control = control.build(l.g().config());
        if (!input.empty()) req.input = l.image(input);
        if (!style.empty()) req.style = l.image(style);
        if (!style_latent.empty()) req.style_latent_override = l.latent<ZPlusSpace>(style_latent);
        if (!input_latent.empty()) req.reconstruction_override = l.latent<WPlusSpace>(input_latent);
        if (age) req.target_age = parse_age(*age);
        if (!age_ref.empty()) req.age_reference = l.image(age_ref);
        if (need_age && !req.target_age && !req.age_reference) {
            throw ValidationError("age", "give --age or --age-ref");
        }
        req.prefer_reference = prefer_ref;
        req.adaptive = adaptive;
        req.seed = seed;

        auto& p = l.manifest.parameters;
        record_control(p, req.control);
        p["adaptive"] = adaptive;
        p["seed"] = seed;
        if (age) p["age"] = *age;
        p["prefer_age_ref"] = prefer_ref;
        return req;
    }
};

struct ToonageCmd {
    Context ctx;
    RequestFlags flags;
    std::string out;

    void attach(CLI::App* cmd) {
        ctx.attach(cmd);
        flags.attach(cmd, true);
        cmd->add_option("--out", out, "Output PNG")->required();
    }

    int run() {
        flags.validate_flags();
        Loaded l = load(ctx, "toonage");
        const ToonAgingRequest req = flags.build(l);
        const ResolvedAge age = resolve_age(req, l.ckpt.age_probe);
        l.manifest.parameters["effective_age"] = age.effective.years();
        if (age.raw_adaptive) l.manifest.parameters["adaptive_raw_age"] = *age.raw_adaptive;
        if (age.from_reference) l.manifest.parameters["estimated_age"] = age.requested.years();
        emit_image(l, out, toon_aging(req, l.g(), l.e(), l.ckpt.age_probe));
        return kOk;
    }
};

struct InterpCmd {
    Context ctx;
    RequestFlags flags;
    std::string style_a, style_b, ages = "10,55", out_dir;
    std::size_t t_steps = 3;

    void attach(CLI::App* cmd) {
        ctx.attach(cmd);
        flags.attach(cmd, false);
        cmd->add_option("--style-a", style_a, "First style exemplar (PNG)")->required();
        cmd->add_option("--style-b", style_b, "Second style exemplar (PNG)")->required();
        cmd->add_option("--ages", ages, "Comma-separated target ages (grid rows)")->capture_default_str();
        cmd->add_option("--t-steps", t_steps, "Interpolation steps (grid columns, >= 2)")->capture_default_str();
        cmd->add_option("--out-dir", out_dir, "Output directory")->required();
    }

    int run() {
        flags.validate_flags();
        std::vector<AgeValue> age_list;
        for (double a : parse_values(ages, "ages")) age_list.push_back(parse_age(a));
        interpolation_steps(t_steps);
        Loaded l = load(ctx, "interp");
        const ToonAgingRequest base = flags.build(l, false);
        const ImageBuffer sa = l.image(style_a);
        const ImageBuffer sb = l.image(style_b);
        l.manifest.parameters["t_steps"] = t_steps;
        emit_grid(l, out_dir, style_age_grid(base, l.g(), l.e(), l.ckpt.age_probe, sa, sb, age_list, t_steps));
        return kOk;
    }
};

struct SweepCmd {
    Context ctx;
    RequestFlags flags;
    std::string param, values, out_dir;

    void attach(CLI::App* cmd) {
        ctx.attach(cmd);
        flags.attach(cmd, true);
        cmd->add_option("--param", param, "Swept parameter: m or c")->required();
        cmd->add_option("--values", values, "Values: a..b or comma-separated list")->required();
        cmd->add_option("--out-dir", out_dir, "Output directory")->required();
    }

    int run() {
        flags.validate_flags();
        if (param != "m" && param != "c") throw ValidationError("param", "must be 'm' or 'c'");
        const std::vector<double> vals = parse_values(values, "values");
        Loaded l = load(ctx, "sweep");
        const ToonAgingRequest base = flags.build(l);
        l.manifest.parameters["param"] = param;
        l.manifest.parameters["values"] = vals;
        GridResult grid;
        if (param == "m") {
            std::vector<std::size_t> ms;
            for (double v : vals) {
                if (v < 0 || v != std::floor(v)) throw ValidationError("values", "m values must be non-negative integers");
                ms.push_back(static_cast<std::size_t>(v));
            }
            grid = sweep_m(base, l.g(), l.e(), l.ckpt.age_probe, ms, flags.control.c, flags.control.s);
        } else {
            grid = sweep_c(base, l.g(), l.e(), l.ckpt.age_probe, base.control.m(), vals, flags.control.s);
        }
        emit_grid(l, out_dir, grid);
        return kOk;
    }
};

struct InvertCmd {
    Context ctx;
    std::string target, out, trace, init;
    std::size_t steps = 200;
    double step_size = 1.0;

    void attach(CLI::App* cmd) {
        ctx.attach(cmd);
        cmd->add_option("--target", target, "Target image (PNG)")->required();
        cmd->add_option("--out", out, "Output latent (.lat)")->required();
        cmd->add_option("--trace", trace, "Loss trace text file (default: <out>.trace.txt)");
        cmd->add_option("--init", init, "Initial W+ latent (.lat); default: encoder inversion of the target");
        cmd->add_option("--steps", steps, "Maximum optimisation steps")->capture_default_str();
        cmd->add_option("--step-size", step_size, "Initial step size")->capture_default_str();
    }

    int run() {
        if (!(step_size > 0.0)) throw ValidationError("step-size", "must be positive");
        Loaded l = load(ctx, "invert");
        const ImageBuffer t = l.image(target);
        const LatentWPlus start = init.empty() ? encode_inv_wplus(l.e(), t) : l.latent<WPlusSpace>(init);
        const ProjectionReport report = project_latent(l.g(), t, start, {steps, step_size});

        const std::string trace_path = trace.empty() ? out + ".trace.txt" : trace;
        std::ostringstream text;
        text.precision(17);
        for (std::size_t i = 0; i < report.loss_trace.size(); ++i) text << i << " " << report.loss_trace[i] << "\n";
        const std::string body = text.str();
        save_latent(out, report.latent);
        write_file_atomic(trace_path, std::span(reinterpret_cast<const std::uint8_t*>(body.data()), body.size()));

        auto& p = l.manifest.parameters;
        p["steps"] = steps;
        p["step_size"] = step_size;
        p["steps_taken"] = report.steps;
        p["initial_loss"] = report.loss_trace.front();
        p["final_loss"] = report.loss_trace.back();
        l.manifest.outputs.push_back(digest_file(out));
        l.manifest.outputs.push_back(digest_file(trace_path));
        write_manifest(out + ".manifest.json", l.manifest);
        std::cout << "initial_loss " << report.loss_trace.front() << "\nfinal_loss " << report.loss_trace.back()
                  << "\nsteps " << report.steps << "\n";
        return kOk;
    }
};

struct GenerateCmd {
    Context ctx;
    std::string out, convention = "extrinsic";
    std::uint64_t seed = 0;

    void attach(CLI::App* cmd) {
        ctx.attach(cmd);
        cmd->add_option("--seed", seed, "Sampling seed")->capture_default_str();
        cmd->add_option("--convention", convention, "Weight convention: extrinsic or age")->capture_default_str();
        cmd->add_option("--out", out, "Output PNG")->required();
    }

    int run() {
        const Convention conv = parse_convention(convention);
        Loaded l = load(ctx, "generate");
        l.manifest.parameters["seed"] = seed;
        record_control(l.manifest.parameters, default_control_weights(l.g().config(), conv));
        emit_image(l, out, random_generate(l.g(), seed, conv));
        return kOk;
    }
};

struct FramesCmd {
    Context ctx;
    RequestFlags flags;
    std::string frames_dir, out_dir;

    void attach(CLI::App* cmd) {
        ctx.attach(cmd);
        flags.attach(cmd, true, false);
        cmd->add_option("--frames-dir", frames_dir, "Directory of PNG frames")->required();
        cmd->add_option("--out-dir", out_dir, "Output directory")->required();
    }

    int run() {
        flags.validate_flags();
        Loaded l = load(ctx, "frames");
        const ToonAgingRequest base = flags.build(l);

        const FrameResult frames = process_frames(l.g(), l.e(), l.ckpt.age_probe, frames_dir, base);
        fs::create_directories(out_dir);
        for (std::size_t i = 0; i < frames.frames.size(); ++i) {
            l.manifest.inputs.push_back(digest_file(frames.frames[i]));
            const fs::path dst = fs::path(out_dir) / frames.frames[i].filename();
            write_png(dst, frames.outputs[i]);
            l.manifest.outputs.push_back(digest_file(dst));
        }
        write_manifest(fs::path(out_dir) / "manifest.json", l.manifest);
        note("processed " + std::to_string(frames.frames.size()) + " frames");
        return kOk;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"toonfuse: one-stage face re-aging with exemplar style transfer"};
    app.require_subcommand(1);
    app.add_flag("-v,--verbose", g_verbose, "Progress messages on stderr");
    app.set_version_flag("--version", kToolVersion);

    InitCmd init;
    InspectCmd inspect;
    ReageCmd reage;
    StylizeCmd stylize;
    ToonageCmd toonage;
    InterpCmd interp;
    SweepCmd sweep;
    InvertCmd invert;
    GenerateCmd generate;
    FramesCmd frames;

    auto* c_init = app.add_subcommand("init", "Create a seeded checkpoint");
    auto* c_inspect = app.add_subcommand("inspect", "Print checkpoint configuration and tensor table");
    auto* c_reage = app.add_subcommand("reage", "Re-age a face");
    auto* c_stylize = app.add_subcommand("stylize", "Exemplar style transfer without re-aging");
    auto* c_toonage = app.add_subcommand("toonage", "Re-age and stylize in one pass");
    auto* c_interp = app.add_subcommand("interp", "Style interpolation x target age grid");
    auto* c_sweep = app.add_subcommand("sweep", "Sweep the coarse cutoff m or weight c");
    auto* c_invert = app.add_subcommand("invert", "Project an image into W+ by gradient descent");
    auto* c_generate = app.add_subcommand("generate", "Random generation from Gaussian latents");
    auto* c_frames = app.add_subcommand("frames", "Apply toonage to every PNG frame in a directory");
    init.attach(c_init);
    inspect.attach(c_inspect);
    reage.attach(c_reage);
    stylize.attach(c_stylize);
    toonage.attach(c_toonage);
    interp.attach(c_interp);
    sweep.attach(c_sweep);
    invert.attach(c_invert);
    generate.attach(c_generate);
    frames.attach(c_frames);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidation;
    }

    try {
        if (c_init->parsed()) return init.run();
        if (c_inspect->parsed()) return inspect.run();
        if (c_reage->parsed()) return reage.run();
        if (c_stylize->parsed()) return stylize.run();
        if (c_toonage->parsed()) return toonage.run();
        if (c_interp->parsed()) return interp.run();
        if (c_sweep->parsed()) return sweep.run();
        if (c_invert->parsed()) return invert.run();
        if (c_generate->parsed()) return generate.run();
        if (c_frames->parsed()) return frames.run();
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kNumeric;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIo;
    }
    return kValidation;
}
