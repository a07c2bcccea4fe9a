// cpmri — command-line front end for the undersampled-Fourier reconstruction
// library: phantom rendering, mask generation, undersampling, classical and
// learned reconstruction, training, and evaluation.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include <CLI11.hpp>

#include "cpmri/cpmri.hpp"

namespace fs = std::filesystem;
using namespace cpmri;

namespace {

// Exit codes: 0 success, 2 usage, 3 I/O, 4 numeric/divergence, 5 infeasible
// configuration.
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitInfeasible = 5;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void ensure_parent_dir(const fs::path& p) {
    const fs::path dir = p.parent_path();
    if (dir.empty()) return;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io_error("cannot create directory " + dir.string() + ": " + ec.message());
}

std::string numbered_name(const std::string& prefix, std::int64_t i, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%03lld%s", prefix.c_str(), static_cast<long long>(i), ext);
    return buf;
}

// ---------------------------------------------------------------------------
// phantom

struct PhantomArgs {
    std::string out_dir = ".";
    std::string prefix = "phantom";
    std::int64_t count = 1;
    std::int64_t height = 64;
    std::int64_t width = 64;
    double jitter = 0.0;
    std::uint64_t seed = 1;
};

int run_phantom(const PhantomArgs& a) {
    Timer timer;
    if (a.count == 0) {
        std::cout << "phantom: count is 0, nothing to write\n";
        return 0;
    }
    fs::create_directories(a.out_dir);
    RunManifest man;
    man.command = "phantom";
    man.config = {{"out_dir", a.out_dir}, {"prefix", a.prefix}, {"count", a.count},
                  {"height", a.height},   {"width", a.width},   {"jitter", a.jitter}};
    man.seeds = {{"seed", a.seed}};
    for (std::int64_t i = 0; i < a.count; ++i) {
        std::mt19937_64 rng(detail::mix_seed(a.seed, static_cast<std::uint64_t>(i) + 1));
        const PhantomSpec spec = (a.jitter > 0.0)
                                     ? detail::jittered_phantom_spec(a.height, a.width, a.jitter, rng)
                                     : shepp_logan_spec(a.height, a.width);
        const ComplexField img = normalize(render_phantom(spec));
        const fs::path out = fs::path(a.out_dir) / numbered_name(a.prefix, i, ".cfld");
        write_field(out, img);
        man.outputs.push_back(out.string());
    }
    man.wall_seconds = timer.seconds();
    man.write(man.outputs.front());
    std::cout << "phantom: wrote " << a.count << " field(s) under " << a.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// mask

struct MaskArgs {
    std::string out;
    std::int64_t height = 64;
    std::int64_t width = 64;
    double accel = 4.0;
    std::int64_t calib = 6;
    std::uint64_t seed = 1;
};

int run_mask(const MaskArgs& a) {
    Timer timer;
    const SamplingMask m = generate_poisson_mask(a.height, a.width, a.accel, a.calib, a.seed);
    ensure_parent_dir(a.out);
    write_mask(a.out, m);
    RunManifest man;
    man.command = "mask";
    man.config = {{"height", a.height}, {"width", a.width},        {"accel", a.accel},
                  {"calib", a.calib},   {"achieved_R", m.achieved_R()}, {"min_distance", m.min_distance}};
    man.seeds = {{"seed", a.seed}};
    man.outputs = {a.out};
    man.wall_seconds = timer.seconds();
    man.write(a.out);
    std::cout << "mask: " << a.out << " achieved R = " << m.achieved_R() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// undersample

struct UndersampleArgs {
    std::string image, mask, out;
};

int run_undersample(const UndersampleArgs& a) {
    Timer timer;
    const ComplexField p = read_field(a.image);
    const SamplingMask m = read_mask(a.mask);
    const ComplexField y = apply_encoding(p, m);
    ensure_parent_dir(a.out);
    write_field(a.out, y);
    RunManifest man;
    man.command = "undersample";
    man.inputs = {a.image, a.mask};
    man.outputs = {a.out};
    man.wall_seconds = timer.seconds();
    man.write(a.out);
    std::cout << "undersample: wrote " << a.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// recon

struct ReconArgs {
    std::string method; // zf | cp | net
    std::string kspace, mask, out;
    std::string weights;   // net
    std::string trace_csv; // cp, optional
    double lambda = 1e-3;
    double sigma = 0.95;
    double tau = 0.95;
    double theta = 1.0;
    std::int64_t iters = 500;
    double tol = 1e-6;
};

int run_recon(const ReconArgs& a) {
    Timer timer;
    const ComplexField y = read_field(a.kspace);
    const SamplingMask m = read_mask(a.mask);

    RunManifest man;
    man.command = "recon";
    man.inputs = {a.kspace, a.mask};
    man.config = {{"method", a.method}};

    ComplexField rec;
    if (a.method == "zf") {
        rec = zero_filled_recon(y, m);
    } else if (a.method == "cp") {
        const CPParams params(a.sigma, a.tau, a.theta, a.lambda, a.iters, a.tol);
        CPSolveResult res = cp_solve(y, m, params);
        rec = std::move(res.image);
        man.config.update({{"sigma", a.sigma}, {"tau", a.tau}, {"theta", a.theta},
                           {"lambda", a.lambda}, {"iters", a.iters}, {"tol", a.tol},
                           {"iterations_run", res.trace.iterations_run}});
        if (!a.trace_csv.empty()) {
            ensure_parent_dir(a.trace_csv);
            detail::atomic_write(a.trace_csv, [&res](std::ostream& os) { res.trace.write_csv(os); });
            man.outputs.push_back(a.trace_csv);
        }
    } else if (a.method == "net") {
        if (a.weights.empty()) throw std::invalid_argument("recon net requires --weights");
        const Checkpoint ck = read_checkpoint(a.weights);
        man.inputs.push_back(a.weights);
        rec = cpnet_infer(y, m, ck.weights);
    } else {
        throw std::invalid_argument("unknown recon method: " + a.method);
    }

    ensure_parent_dir(a.out);
    write_field(a.out, rec);
    man.outputs.insert(man.outputs.begin(), a.out);
    man.wall_seconds = timer.seconds();
    man.write(a.out);
    std::cout << "recon(" << a.method << "): wrote " << a.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// train

// Configuration precedence: built-in defaults < config file < command-line
// flags. The file is plain key=value with '#' comments; keys are the train
// flag names without the leading dashes.
void apply_train_config_file(const std::string& path, CLI::App* tr, TrainConfig& cfg) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open config file: " + path);

    const auto flag_given = [tr](const char* flag) { return tr->count(flag) > 0; };
    std::unordered_map<std::string, std::function<void(const std::string&)>> setters;
    const auto bind = [&](const char* key, const char* flag, auto& field) {
        setters[key] = [&field, flag, flag_given](const std::string& value) {
            if (flag_given(flag)) return;
            std::istringstream ss(value);
            ss >> field;
            if (ss.fail()) throw io_error(std::string("config value for '") + flag + "' is not valid");
        };
    };
    bind("height", "--height", cfg.height);
    bind("width", "--width", cfg.width);
    bind("train-count", "--train-count", cfg.train_count);
    bind("val-count", "--val-count", cfg.val_count);
    bind("calib", "--calib", cfg.calib_radius);
    bind("jitter", "--jitter", cfg.jitter);
    bind("epochs", "--epochs", cfg.epochs);
    bind("batch-size", "--batch-size", cfg.batch_size);
    bind("lr", "--lr", cfg.learning_rate);
    bind("beta1", "--beta1", cfg.adam_beta1);
    bind("beta2", "--beta2", cfg.adam_beta2);
    bind("eps", "--eps", cfg.adam_eps);
    bind("seed", "--seed", cfg.seed);
    bind("threads", "--threads", cfg.threads);
    setters["augment"] = [&cfg, flag_given](const std::string& value) {
        if (flag_given("--augment")) return;
        if (value == "true" || value == "1") cfg.augment = true;
        else if (value == "false" || value == "0") cfg.augment = false;
        else throw io_error("config value for '--augment' must be true/false");
    };
    setters["accel"] = [&cfg, flag_given](const std::string& value) {
        if (flag_given("--accel")) return;
        cfg.accel_set.clear();
        std::string item;
        std::istringstream ss(value);
        while (std::getline(ss, item, ','))
            if (!item.empty()) cfg.accel_set.push_back(std::stod(item));
        if (cfg.accel_set.empty()) throw io_error("config key 'accel' lists no factors");
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw io_error("config line " + std::to_string(line_no) + " is not key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end())
            throw io_error("unknown config key '" + key + "' (line " + std::to_string(line_no) + ")");
        it->second(value);
    }
}

int run_train(const TrainConfig& cfg, const std::string& out_dir, const std::string& resume) {
    Timer timer;
    fs::create_directories(out_dir);
    std::optional<fs::path> resume_path;
    if (!resume.empty()) resume_path = resume;

    const TrainResult res = train(cfg, fs::path(out_dir), resume_path);

    const fs::path history_csv = fs::path(out_dir) / "history.csv";
    detail::atomic_write(history_csv, [&res](std::ostream& os) { res.history.write_csv(os); });

    RunManifest man;
    man.command = "train";
    man.config = {{"height", cfg.height},       {"width", cfg.width},
                  {"train_count", cfg.train_count}, {"val_count", cfg.val_count},
                  {"accel_set", cfg.accel_set}, {"calib_radius", cfg.calib_radius},
                  {"augment", cfg.augment},     {"jitter", cfg.jitter},
                  {"epochs", cfg.epochs},       {"batch_size", cfg.batch_size},
                  {"learning_rate", cfg.learning_rate}, {"adam_beta1", cfg.adam_beta1},
                  {"adam_beta2", cfg.adam_beta2}, {"adam_eps", cfg.adam_eps},
                  {"best_epoch", res.best_epoch}};
    man.seeds = {{"seed", cfg.seed}};
    man.outputs = {(fs::path(out_dir) / "best.ckpt").string(), history_csv.string()};
    man.wall_seconds = timer.seconds();
    man.write(fs::path(out_dir) / "train");

    std::cout << "train: " << res.history.epochs_run() << " epoch(s), best epoch "
              << res.best_epoch << ", val loss " << res.history.val_loss.back() << " (initial "
              << res.history.initial_val_loss << ")\n";
    return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
    std::string ref;
    std::vector<std::string> recons;
    std::vector<std::string> labels;
    double accel = 0.0;
    std::string out;
    std::string images_dir;
    double amplify = 5.0;
};

int run_eval(const EvalArgs& a) {
    Timer timer;
    if (a.labels.size() != a.recons.size())
        throw std::invalid_argument("eval: need exactly one --label per --recon");
    const ComplexField ref = read_field(a.ref);
    std::vector<ComplexField> images;
    images.reserve(a.recons.size());
    for (const std::string& path : a.recons) images.push_back(read_field(path));

    std::vector<LabeledRecon> rows;
    for (std::size_t i = 0; i < images.size(); ++i)
        rows.push_back({a.labels[i], a.accel, &images[i]});
    const ReconReport rep = build_report(rows, ref, a.ref);
    for (const std::string& err : rep.row_errors) std::cerr << "eval: skipped row: " << err << "\n";

    ensure_parent_dir(a.out);
    detail::atomic_write(a.out, [&rep](std::ostream& os) { rep.write_csv(os); });

    RunManifest man;
    man.command = "eval";
    man.config = {{"accel", a.accel}, {"labels", a.labels}, {"amplify", a.amplify}};
    man.inputs = a.recons;
    man.inputs.push_back(a.ref);
    man.outputs = {a.out};

    if (!a.images_dir.empty()) {
        fs::create_directories(a.images_dir);
        const double peak = max_abs(ref);
        auto to_gray = [&](const ComplexField& img, double gain) {
            std::vector<double> px(img.data.size());
            for (std::size_t i = 0; i < px.size(); ++i)
                px[i] = gain * std::abs(img.data[i]) / peak;
            return px;
        };
        const fs::path refp = fs::path(a.images_dir) / "reference.pgm";
        write_pgm(refp, to_gray(ref, 1.0), ref.height, ref.width);
        man.outputs.push_back(refp.string());
        for (std::size_t i = 0; i < images.size(); ++i) {
            const fs::path imgp = fs::path(a.images_dir) / (a.labels[i] + ".pgm");
            write_pgm(imgp, to_gray(images[i], 1.0), ref.height, ref.width);
            man.outputs.push_back(imgp.string());
            // amplified absolute error of the magnitude images
            std::vector<double> err(ref.data.size());
            for (std::size_t j = 0; j < err.size(); ++j)
                err[j] = a.amplify * std::abs(std::abs(images[i].data[j]) - std::abs(ref.data[j])) / peak;
            const fs::path errp = fs::path(a.images_dir) / (a.labels[i] + "_error.pgm");
            write_pgm(errp, err, ref.height, ref.width);
            man.outputs.push_back(errp.string());
        }
    }

    man.wall_seconds = timer.seconds();
    man.write(a.out);
    rep.write_csv(std::cout);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Undersampled-Fourier reconstruction: classical Chambolle-Pock and its unrolled "
                 "learned variant, with synthetic training and evaluation."};
    app.require_subcommand(1);

    PhantomArgs pa;
    CLI::App* phantom = app.add_subcommand("phantom", "Render normalized head phantoms");
    phantom->add_option("--out-dir", pa.out_dir, "Output directory")->capture_default_str();
    phantom->add_option("--prefix", pa.prefix, "Output file prefix")->capture_default_str();
    phantom->add_option("--count", pa.count, "Number of phantoms")->capture_default_str();
    phantom->add_option("--height", pa.height, "Grid rows")->capture_default_str();
    phantom->add_option("--width", pa.width, "Grid columns")->capture_default_str();
    phantom->add_option("--jitter", pa.jitter, "Ellipse jitter amount (0 = classic table)")
        ->capture_default_str();
    phantom->add_option("--seed", pa.seed, "Jitter seed")->capture_default_str();

    MaskArgs ma;
    CLI::App* mask = app.add_subcommand("mask", "Generate a Poisson-disk sampling mask");
    mask->add_option("--out", ma.out, "Output mask file")->required();
    mask->add_option("--height", ma.height, "Grid rows")->capture_default_str();
    mask->add_option("--width", ma.width, "Grid columns")->capture_default_str();
    mask->add_option("--accel", ma.accel, "Target acceleration factor R")->capture_default_str();
    mask->add_option("--calib", ma.calib, "Fully sampled central radius")->capture_default_str();
    mask->add_option("--seed", ma.seed, "Dart-throwing seed")->capture_default_str();

    UndersampleArgs ua;
    CLI::App* und = app.add_subcommand("undersample", "Apply the undersampled Fourier encoding");
    und->add_option("--image", ua.image, "Input image field")->required();
    und->add_option("--mask", ua.mask, "Sampling mask")->required();
    und->add_option("--out", ua.out, "Output k-space field")->required();

    ReconArgs ra;
    CLI::App* recon = app.add_subcommand("recon", "Reconstruct an image from undersampled k-space");
    recon->add_option("--method", ra.method, "zf | cp | net")->required();
    recon->add_option("--kspace", ra.kspace, "Undersampled k-space field")->required();
    recon->add_option("--mask", ra.mask, "Sampling mask")->required();
    recon->add_option("--out", ra.out, "Output reconstruction field")->required();
    recon->add_option("--weights", ra.weights, "Weight checkpoint (method net)");
    recon->add_option("--trace", ra.trace_csv, "Write per-iteration trace CSV (method cp)");
    recon->add_option("--lambda", ra.lambda, "Regularization weight (cp)")->capture_default_str();
    recon->add_option("--sigma", ra.sigma, "Dual step (cp)")->capture_default_str();
    recon->add_option("--tau", ra.tau, "Primal step (cp)")->capture_default_str();
    recon->add_option("--theta", ra.theta, "Extrapolation weight (cp)")->capture_default_str();
    recon->add_option("--iters", ra.iters, "Iteration budget (cp)")->capture_default_str();
    recon->add_option("--tol", ra.tol, "Relative-change stopping threshold (cp)")
        ->capture_default_str();

    TrainConfig cfg;
    std::string train_out_dir;
    std::string train_resume;
    std::string train_config_file;
    CLI::App* tr = app.add_subcommand("train", "Train the unrolled network on synthetic phantoms");
    tr->add_option("--config", train_config_file,
                   "Key=value config file; command-line flags take precedence");
    tr->add_option("--out-dir", train_out_dir, "Checkpoint/history output directory")->required();
    tr->add_option("--height", cfg.height, "Grid rows")->capture_default_str();
    tr->add_option("--width", cfg.width, "Grid columns")->capture_default_str();
    tr->add_option("--train-count", cfg.train_count, "Training samples")->capture_default_str();
    tr->add_option("--val-count", cfg.val_count, "Validation samples")->capture_default_str();
    tr->add_option("--accel", cfg.accel_set, "Acceleration factor set (repeatable)")
        ->capture_default_str();
    tr->add_option("--calib", cfg.calib_radius, "Calibration radius")->capture_default_str();
    tr->add_flag("--augment,!--no-augment", cfg.augment, "Random dihedral augmentation")
        ->capture_default_str();
    tr->add_option("--jitter", cfg.jitter, "Phantom jitter amount")->capture_default_str();
    tr->add_option("--epochs", cfg.epochs, "Training epochs")->capture_default_str();
    tr->add_option("--batch-size", cfg.batch_size, "Mini-batch size")->capture_default_str();
    tr->add_option("--lr", cfg.learning_rate, "Adam learning rate")->capture_default_str();
    tr->add_option("--beta1", cfg.adam_beta1, "Adam beta1")->capture_default_str();
    tr->add_option("--beta2", cfg.adam_beta2, "Adam beta2")->capture_default_str();
    tr->add_option("--eps", cfg.adam_eps, "Adam epsilon")->capture_default_str();
    tr->add_option("--seed", cfg.seed, "Master seed (dataset, init, batch order)")
        ->capture_default_str();
    tr->add_option("--threads", cfg.threads, "Worker threads (0 = all logical processors)")
        ->capture_default_str();
    tr->add_option("--resume", train_resume, "Resume from an epoch checkpoint");

    EvalArgs ea;
    CLI::App* ev = app.add_subcommand("eval", "Score reconstructions against a reference");
    ev->add_option("--ref", ea.ref, "Reference image field")->required();
    ev->add_option("--recon", ea.recons, "Reconstruction field (repeatable)")->required();
    ev->add_option("--label", ea.labels, "Method label per --recon (repeatable)")->required();
    ev->add_option("--accel", ea.accel, "Acceleration factor recorded in the report")
        ->capture_default_str();
    ev->add_option("--out", ea.out, "Output report CSV")->required();
    ev->add_option("--images", ea.images_dir, "Also write magnitude/error PGM images here");
    ev->add_option("--amplify", ea.amplify, "Error-map amplification factor")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*phantom) return run_phantom(pa);
        if (*mask) return run_mask(ma);
        if (*und) return run_undersample(ua);
        if (*recon) return run_recon(ra);
        if (*tr) {
            if (!train_config_file.empty()) apply_train_config_file(train_config_file, tr, cfg);
            return run_train(cfg, train_out_dir, train_resume);
        }
        if (*ev) return run_eval(ea);
    } catch (const io_error& e) {
        std::cerr << "cpmri: I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const divergence_error& e) {
        std::cerr << "cpmri: numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const infeasible_mask_error& e) {
        std::cerr << "cpmri: infeasible configuration: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const config_error& e) {
        std::cerr << "cpmri: infeasible configuration: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::invalid_argument& e) {
        std::cerr << "cpmri: usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "cpmri: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
