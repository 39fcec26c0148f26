// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: embed / transmit / conceal / sweep.
// Exit codes: 0 ok, 2 validation error, 3 capacity exhausted, 4 extraction
// integrity error.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rdh3ec/channel.hpp"
#include "rdh3ec/conceal.hpp"
#include "rdh3ec/container.hpp"
#include "rdh3ec/frame.hpp"
#include "rdh3ec/rng.hpp"

using nlohmann::json;
using namespace rdh3ec;
namespace fs = std::filesystem;

namespace {

struct InputSpec {
    std::string synth;       // "texture" or "gradient"; empty when raw
    std::string path;        // raw file
    std::string layout = "y8";
    uint64_t seed = 7;
    int shift_x = 3;
    int shift_y = -2;
    int width = 176;
    int height = 144;
    int frames = 30;
};

struct Options {
    InputSpec input;
    std::vector<int> qp = {24};
    std::vector<int> alpha = {1};
    uint64_t key = 1;
    std::vector<double> plr = {0.0};
    int seeds = 1;
    uint64_t seed = 0; // single-seed commands
    std::string placement = "random";
    int gop = 10;
    int ec_trials = 8;
    std::string out = "out";
    std::string container;
    std::string mask;
};

Placement placement_of(const std::string& s) {
    if (s == "random") return Placement::random;
    if (s == "changeless") return Placement::changeless;
    throw ValidationError("placement must be 'random' or 'changeless'");
}

Sequence load_input(const InputSpec& in, int gop) {
    Sequence seq;
    if (!in.synth.empty()) {
        if (in.synth == "texture") {
            seq = synth_sequence(SynthKind::translating_texture, in.seed, in.width, in.height,
                                 in.frames, in.shift_x, in.shift_y);
        } else if (in.synth == "gradient") {
            seq = synth_sequence(SynthKind::moving_gradient, in.seed, in.width, in.height,
                                 in.frames);
        } else {
            throw ValidationError("synth kind must be 'texture' or 'gradient'");
        }
    } else if (!in.path.empty()) {
        RawLayout layout;
        if (in.layout == "y8") {
            layout = RawLayout::y8;
        } else if (in.layout == "yuv420") {
            layout = RawLayout::yuv420;
        } else {
            throw ValidationError("layout must be 'y8' or 'yuv420'");
        }
        seq = load_raw_sequence(in.path, in.width, in.height, in.frames, layout);
    } else {
        throw ValidationError("give --synth or --input");
    }
    seq.gop_length = gop;
    return seq;
}

std::string input_tag(const InputSpec& in) {
    if (!in.synth.empty()) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "synth:%s:%llu:%d:%d:%dx%dx%d", in.synth.c_str(),
                      static_cast<unsigned long long>(in.seed), in.shift_x, in.shift_y, in.width,
                      in.height, in.frames);
        return buf;
    }
    return "raw:" + in.path;
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex16(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void apply_config_file(const std::string& path, Options& o) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    json j = json::parse(in, nullptr, true, true);
    const auto get = [&](const char* key, auto& slot) {
        if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
    };
    get("synth", o.input.synth);
    get("input", o.input.path);
    get("layout", o.input.layout);
    get("synth_seed", o.input.seed);
    get("shift_x", o.input.shift_x);
    get("shift_y", o.input.shift_y);
    get("width", o.input.width);
    get("height", o.input.height);
    get("frames", o.input.frames);
    get("qp", o.qp);
    get("alpha", o.alpha);
    get("key", o.key);
    get("plr", o.plr);
    get("seeds", o.seeds);
    get("seed", o.seed);
    get("placement", o.placement);
    get("gop", o.gop);
    get("ec_trials", o.ec_trials);
    get("out", o.out);
    get("container", o.container);
    get("mask", o.mask);
}

void add_config_flag(CLI::App* cmd, std::string& config_path) {
    cmd->add_option("--config", config_path, "JSON config file (flags override it)");
}

void add_input_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--synth", o.input.synth, "synthetic input: texture | gradient");
    cmd->add_option("--input", o.input.path, "raw input file");
    cmd->add_option("--layout", o.input.layout, "raw layout: y8 | yuv420");
    cmd->add_option("--synth-seed", o.input.seed, "synthesis seed");
    cmd->add_option("--shift-x", o.input.shift_x, "texture shift per frame, x");
    cmd->add_option("--shift-y", o.input.shift_y, "texture shift per frame, y");
    cmd->add_option("--width", o.input.width, "frame width");
    cmd->add_option("--height", o.input.height, "frame height");
    cmd->add_option("--frames", o.input.frames, "frame count");
}

void write_text_atomic(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp);
        out << text;
    }
    fs::rename(tmp, path);
}

std::string fmt_metric(double v) {
    char buf[64];
    if (std::isinf(v)) return "inf";
    if (std::isnan(v)) return "nan";
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// ---------------------------------------------------------------- embed ---

int cmd_embed(const Options& o) {
    const Sequence seq = load_input(o.input, o.gop);
    if (o.qp.size() != 1 || o.alpha.size() != 1) {
        throw ValidationError("embed takes a single --qp and --alpha");
    }
    EncodedSequence enc = encode_sequence(seq, o.qp[0], o.alpha[0], o.key,
                                          placement_of(o.placement), o.gop);

    fs::create_directories(o.out);
    MarkedContainer c;
    c.width = enc.width;
    c.height = enc.height;
    c.qp = enc.qp;
    c.alpha = enc.alpha;
    c.key_id = o.key;
    for (const auto& f : enc.frames) c.frames.push_back(f.marked);
    write_container(c, o.out + "/marked.rdh3");

    json report;
    report["input"] = input_tag(o.input);
    report["qp"] = enc.qp;
    report["alpha"] = enc.alpha;
    report["placement"] = o.placement;
    report["frames"] = json::array();
    int total_spills = 0;
    for (size_t t = 0; t < enc.frames.size(); ++t) {
        const auto& caps = enc.frames[t].capacities;
        int64_t total = 0;
        int mn = caps.empty() ? 0 : caps[0];
        for (int v : caps) {
            total += v;
            mn = std::min(mn, v);
        }
        total_spills += enc.frames[t].spill_events;
        report["frames"].push_back({{"frame", t},
                                    {"first_in_gop", enc.frames[t].first_in_gop},
                                    {"capacity_total", total},
                                    {"capacity_min", mn},
                                    {"max_feasible_alpha",
                                     max_feasible_alpha(total, static_cast<int>(caps.size()))},
                                    {"spill_events", enc.frames[t].spill_events},
                                    {"capacities", caps}});
    }
    report["spill_events_total"] = total_spills;
    write_text_atomic(o.out + "/embed_report.json", report.dump(2) + "\n");

    std::printf("embedded %zu frames at qp=%d alpha=%d -> %s/marked.rdh3 (%d spill events)\n",
                enc.frames.size(), enc.qp, enc.alpha, o.out.c_str(), total_spills);
    return 0;
}

// ------------------------------------------------------------- transmit ---

int cmd_transmit(const Options& o) {
    if (o.container.empty()) throw ValidationError("transmit needs --container");
    if (o.plr.size() != 1) throw ValidationError("transmit takes a single --plr");
    MarkedContainer c = read_container(o.container);
    const int n_mbs = (c.width / kMbSize) * (c.height / kMbSize);

    fs::create_directories(o.out);
    std::vector<LossMask> masks;
    int lost_total = 0;
    for (size_t t = 0; t < c.frames.size(); ++t) {
        LossMask m = draw_mask(n_mbs, o.plr[0], mask_seed(o.seed, static_cast<int>(t)));
        for (size_t k = 0; k < m.lost.size(); ++k) {
            if (m.lost[k]) c.frames[t][k].coeffs.fill(0);
        }
        lost_total += m.lost_count();
        masks.push_back(std::move(m));
    }
    write_container(c, o.out + "/received.rdh3");
    write_mask_sidecar(masks, o.out + "/mask.bin");
    std::printf("transmitted %zu frames at plr=%.3f seed=%llu: %d macroblocks lost\n",
                c.frames.size(), o.plr[0], static_cast<unsigned long long>(o.seed), lost_total);
    return 0;
}

// -------------------------------------------------------------- conceal ---

int cmd_conceal(const Options& o, bool key_given) {
    if (o.container.empty()) throw ValidationError("conceal needs --container");
    if (o.mask.empty()) throw ValidationError("conceal needs --mask");
    MarkedContainer c = read_container(o.container);
    const int n_mbs = (c.width / kMbSize) * (c.height / kMbSize);
    const auto masks =
        read_mask_sidecar(o.mask, n_mbs, static_cast<int>(c.frames.size()));
    const uint64_t key = key_given ? o.key : c.key_id; // header key unless overridden
    const Placement placement = placement_of(o.placement);

    fs::create_directories(o.out);
    const std::string y8_path = o.out + "/concealed.y8";
    std::remove(y8_path.c_str());
    std::string csv = "frame,mb_index,status\n";

    Frame reference;
    bool have_reference = false;
    int black_total = 0, concealed_total = 0;
    for (size_t t = 0; t < c.frames.size(); ++t) {
        const SlotMap map =
            build_slotmap(n_mbs, c.alpha, slot_key(key, static_cast<int>(t)), placement);
        ReceivedFrame rx;
        rx.mbs = c.frames[t];
        rx.lost = masks[t];
        ConcealmentOutcome out = decode_frame(rx, map, c.qp, have_reference ? &reference : nullptr,
                                              c.width, c.height);
        append_frame(out.frame, y8_path);
        for (int k = 0; k < n_mbs; ++k) {
            csv += std::to_string(t) + "," + std::to_string(k) + "," +
                   status_name(out.status[static_cast<size_t>(k)]) + "\n";
        }
        black_total += out.black_count;
        concealed_total += out.concealed_count;
        reference = std::move(out.frame);
        have_reference = true;
    }
    write_text_atomic(o.out + "/status.csv", csv);
    std::printf("concealed %zu frames -> %s (%d concealed, %d black macroblocks)\n",
                c.frames.size(), y8_path.c_str(), concealed_total, black_total);
    return 0;
}

// ---------------------------------------------------------------- sweep ---

const char* kCsvHeader =
    "cell_id,qp,alpha,plr,seed,placement,frame,first_in_gop,psnr,mse,psnr_marked,"
    "psnr_unmarked,ec_meas,d_meas,ec_pro,ec_rec,d_pro,d_rec,ecdr_pro,ecdr_rec,ec_diff,d_diff,"
    "p_c,p_nc,lost,black,concealed,spill_events\n";

int cmd_sweep(const Options& o) {
    const Sequence seq = load_input(o.input, o.gop);
    const Placement placement = placement_of(o.placement);
    fs::create_directories(o.out + "/cells");

    struct Cell {
        int qp, alpha;
        double plr;
        uint64_t seed;
        std::string id;
    };
    std::vector<Cell> cells;
    for (int qp : o.qp) {
        for (int alpha : o.alpha) {
            for (double plr : o.plr) {
                for (int s = 0; s < o.seeds; ++s) {
                    char cell_tag[256];
                    std::snprintf(cell_tag, sizeof cell_tag,
                                  "%s|qp=%d|alpha=%d|plr=%.6f|seed=%d|placement=%s|gop=%d|key=%llu",
                                  input_tag(o.input).c_str(), qp, alpha, plr, s,
                                  o.placement.c_str(), o.gop,
                                  static_cast<unsigned long long>(o.key));
                    cells.push_back({qp, alpha, plr, static_cast<uint64_t>(s), hex16(fnv1a(cell_tag))});
                }
            }
        }
    }

    // Encodes are shared by every (plr, seed) cell of the same (qp, alpha).
    std::map<std::pair<int, int>, EncodedSequence> encodes;
    std::map<std::pair<int, int>, std::vector<MeasuredEcd>> measures;
    for (int qp : o.qp) {
        for (int alpha : o.alpha) {
            EncodedSequence enc = encode_sequence(seq, qp, alpha, o.key, placement, o.gop);
            std::vector<MeasuredEcd> meas(seq.frames.size());
            if (o.ec_trials > 0) {
                for (size_t t = 0; t < seq.frames.size(); ++t) {
                    meas[t] = measure_ec_d(frame_triples(enc.frames[t].cover), o.ec_trials,
                                           ecd_seed(o.key, static_cast<int>(t)));
                }
            }
            measures[{qp, alpha}] = std::move(meas);
            encodes[{qp, alpha}] = std::move(enc);
        }
    }

    // Worker pool over cells; each cell writes its file atomically, the
    // aggregates are assembled single-threaded afterwards.
    int done = 0, skipped = 0;
    std::string first_error;
    const int n_cells = static_cast<int>(cells.size());
#pragma omp parallel for schedule(dynamic) reduction(+ : done, skipped)
    for (int ci = 0; ci < n_cells; ++ci) {
        const Cell& cell = cells[static_cast<size_t>(ci)];
        const std::string path = o.out + "/cells/" + cell.id + ".csv";
        if (fs::exists(path)) {
            ++skipped; // resumable: cell ids are content hashes of the config
            continue;
        }
        try {
            const EncodedSequence& enc = encodes.at({cell.qp, cell.alpha});
            const auto& meas = measures.at({cell.qp, cell.alpha});
            const int n_mbs = (enc.width / kMbSize) * (enc.height / kMbSize);
            const LossModel lm = loss_model(n_mbs, cell.alpha, cell.plr);
            DecodeRun run = transmit_and_decode(enc, seq, cell.plr, cell.seed);

            std::string csv = kCsvHeader;
            for (size_t t = 0; t < seq.frames.size(); ++t) {
                const FrameReport& rep = run.reports[t];
                const EcdEstimates est =
                    estimate_ec_d(census(frame_triples(enc.frames[t].cover)));
                char row[512];
                std::snprintf(row, sizeof row, "%s,%d,%d,%.6f,%llu,%s,%d,%d,", cell.id.c_str(),
                              cell.qp, cell.alpha, cell.plr,
                              static_cast<unsigned long long>(cell.seed), o.placement.c_str(),
                              rep.frame, rep.first_in_gop ? 1 : 0);
                csv += row;
                csv += fmt_metric(rep.psnr) + "," + fmt_metric(rep.mse) + "," +
                       fmt_metric(rep.psnr_marked) + "," + fmt_metric(rep.psnr_unmarked) + "," +
                       fmt_metric(meas[t].mean_bits) + "," + fmt_metric(meas[t].mean_cost) + "," +
                       fmt_metric(est.ec_pro) + "," + fmt_metric(est.ec_rec) + "," +
                       fmt_metric(est.d_pro) + "," + fmt_metric(est.d_rec) + "," +
                       fmt_metric(est.ecdr_pro) + "," + fmt_metric(est.ecdr_rec) + "," +
                       fmt_metric(est.ec_diff) + "," + fmt_metric(est.d_diff) + "," +
                       fmt_metric(lm.p_c) + "," + fmt_metric(lm.p_nc) + "," +
                       std::to_string(rep.lost_count) + "," + std::to_string(rep.black_count) +
                       "," + std::to_string(rep.concealed_count) + "," +
                       std::to_string(enc.frames[t].spill_events) + "\n";
            }
            write_text_atomic(path, csv);
            ++done;
        } catch (const std::exception& e) {
#pragma omp critical
            if (first_error.empty()) first_error = e.what();
        }
    }
    if (!first_error.empty()) throw Error("sweep cell failed: " + first_error);

    // Assemble the aggregate files from the cell data.
    std::vector<std::string> columns;
    {
        std::string h(kCsvHeader);
        h.pop_back();
        size_t pos = 0;
        while (pos <= h.size()) {
            size_t comma = h.find(',', pos);
            if (comma == std::string::npos) comma = h.size();
            columns.push_back(h.substr(pos, comma - pos));
            pos = comma + 1;
        }
    }
    std::string all_csv = kCsvHeader;
    json rows = json::array();
    json agg = json::array();
    for (const Cell& cell : cells) {
        std::ifstream in(o.out + "/cells/" + cell.id + ".csv");
        if (!in) throw IoError("missing cell " + cell.id);
        std::string line;
        std::getline(in, line); // header
        double psnr_nf = 0, psnr_f = 0;
        int n_nf = 0, n_f = 0, black = 0;
        while (std::getline(in, line)) {
            all_csv += line + "\n";
            std::vector<std::string> cols;
            size_t pos = 0;
            while (pos <= line.size()) {
                size_t comma = line.find(',', pos);
                if (comma == std::string::npos) comma = line.size();
                cols.push_back(line.substr(pos, comma - pos));
                pos = comma + 1;
            }
            json row;
            for (size_t i = 0; i < columns.size() && i < cols.size(); ++i) {
                row[columns[i]] = cols[i];
            }
            rows.push_back(std::move(row));
            const bool first = cols[7] == "1";
            const double p = cols[8] == "inf" ? std::numeric_limits<double>::infinity()
                                              : std::stod(cols[8]);
            if (first) {
                psnr_f += p;
                ++n_f;
            } else {
                psnr_nf += p;
                ++n_nf;
            }
            black += std::stoi(cols[25]);
        }
        agg.push_back({{"cell_id", cell.id},
                       {"qp", cell.qp},
                       {"alpha", cell.alpha},
                       {"plr", cell.plr},
                       {"seed", cell.seed},
                       {"placement", o.placement},
                       {"mean_psnr_nonfirst", n_nf ? psnr_nf / n_nf : 0.0},
                       {"mean_psnr_first", n_f ? psnr_f / n_f : 0.0},
                       {"black_total", black}});
    }
    write_text_atomic(o.out + "/metrics.csv", all_csv);
    write_text_atomic(o.out + "/metrics.json",
                      json{{"cells", agg}, {"rows", rows}}.dump(2) + "\n");
    std::printf("sweep: %d cells computed, %d reused -> %s/metrics.csv\n", done, skipped,
                o.out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"intra-frame error concealment via reversible triple embedding"};
    app.require_subcommand(1);
    Options o;
    std::string config_path;

    CLI::App* embed = app.add_subcommand("embed", "encode, embed vectors, write the container");
    add_config_flag(embed, config_path);
    add_input_flags(embed, o);
    embed->add_option("--qp", o.qp, "quantization parameter");
    embed->add_option("--alpha", o.alpha, "vector repetition factor");
    embed->add_option("--key", o.key, "scrambling key");
    embed->add_option("--placement", o.placement, "random | changeless");
    embed->add_option("--gop", o.gop, "GOP length (reporting epoch)");
    embed->add_option("--out", o.out, "output directory");

    CLI::App* transmit = app.add_subcommand("transmit", "drop macroblocks at the loss rate");
    add_config_flag(transmit, config_path);
    transmit->add_option("--container", o.container, "marked container");
    transmit->add_option("--plr", o.plr, "packet loss rate");
    transmit->add_option("--seed", o.seed, "channel seed");
    transmit->add_option("--out", o.out, "output directory");

    CLI::App* conceal = app.add_subcommand("conceal", "extract, recover and conceal");
    add_config_flag(conceal, config_path);
    conceal->add_option("--container", o.container, "received container");
    conceal->add_option("--mask", o.mask, "mask sidecar");
    conceal->add_option("--key", o.key, "scrambling key (default: container header)");
    conceal->add_option("--placement", o.placement, "random | changeless");
    conceal->add_option("--gop", o.gop, "GOP length (reporting epoch)");
    conceal->add_option("--out", o.out, "output directory");

    CLI::App* sweep = app.add_subcommand("sweep", "metrics grid over qp x alpha x plr x seeds");
    add_config_flag(sweep, config_path);
    add_input_flags(sweep, o);
    sweep->add_option("--qp", o.qp, "qp list")->delimiter(',');
    sweep->add_option("--alpha", o.alpha, "alpha list")->delimiter(',');
    sweep->add_option("--plr", o.plr, "loss-rate list")->delimiter(',');
    sweep->add_option("--seeds", o.seeds, "number of channel seeds per cell");
    sweep->add_option("--key", o.key, "scrambling key");
    sweep->add_option("--placement", o.placement, "random | changeless");
    sweep->add_option("--gop", o.gop, "GOP length (reporting epoch)");
    sweep->add_option("--ec-trials", o.ec_trials, "full-embed capacity trials per frame");
    sweep->add_option("--out", o.out, "output directory");

    try {
        // Parse once to learn the config path, apply the file, then reparse
        // so explicit flags take precedence over file values.
        app.allow_extras();
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError&) {
        }
        if (!config_path.empty()) apply_config_file(config_path, o);
        app.clear();
        app.allow_extras(false);
        app.parse(argc, argv);

        if (embed->parsed()) return cmd_embed(o);
        if (transmit->parsed()) return cmd_transmit(o);
        if (conceal->parsed()) return cmd_conceal(o, conceal->count("--key") > 0);
        if (sweep->parsed()) return cmd_sweep(o);
        return 2;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_name() == "CallForHelp" ? 0 : 2;
    } catch (const CapacityError& e) {
        std::fprintf(stderr, "capacity exhausted: %s\n", e.what());
        return 3;
    } catch (const IntegrityError& e) {
        std::fprintf(stderr, "extraction integrity: %s\n", e.what());
        return 4;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
