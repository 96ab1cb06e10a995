#include "zsl/data.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "zsl/error.hpp"
#include "zsl/rng.hpp"

namespace fs = std::filesystem;

namespace zsl {

namespace {

// ---- little-endian byte packing -------------------------------------------

void put_u8(std::string& out, std::uint8_t v) { out.push_back(static_cast<char>(v)); }

void put_u16(std::string& out, std::uint16_t v) {
    for (int i = 0; i < 2; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_i32(std::string& out, std::int32_t v) { put_u32(out, static_cast<std::uint32_t>(v)); }
void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }
void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void write_file(const fs::path& path, const std::string& buf) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw FileError("cannot open " + path.string() + " for writing");
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    f.flush();
    if (!f)
        throw FileError("write failed: " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw FileError("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    if (f.bad())
        throw FileError("read failed: " + path.string());
    return std::move(ss).str();
}

struct Reader {
    const std::string& buf;
    std::string name;
    std::size_t pos = 0;

    std::size_t remaining() const { return buf.size() - pos; }

    void need(std::size_t n) const {
        if (remaining() < n)
            throw FileError(name + ": truncated file");
    }

    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(buf[pos++]);
    }

    std::uint16_t u16() {
        need(2);
        std::uint16_t v = 0;
        for (int i = 0; i < 2; ++i)
            v = static_cast<std::uint16_t>(v | (std::uint16_t(std::uint8_t(buf[pos + i])) << (8 * i)));
        pos += 2;
        return v;
    }

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= std::uint32_t(std::uint8_t(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= std::uint64_t(std::uint8_t(buf[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }

    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    float f32() { return std::bit_cast<float>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }

    std::string bytes(std::size_t n) {
        need(n);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }

    void expect_end() const {
        if (pos != buf.size())
            throw FormatError(name + ": trailing bytes after payload");
    }
};

constexpr char kMatrixMagic[4] = {'Z', 'S', 'L', 'M'};
constexpr char kCheckpointMagic[4] = {'Z', 'S', 'L', 'C'};
constexpr std::uint16_t kMatrixVersion = 1;
constexpr std::uint16_t kCheckpointVersion = 1;

constexpr std::array<const char*, 8> kParamNames = {
    "visual_w",    "visual_b",    "semantic_w1",  "semantic_b1",
    "semantic_w2", "semantic_b2", "classifier_w", "classifier_b"};

bool magic_matches(const std::string& buf, const char (&magic)[4]) {
    return buf.size() >= 4 && std::memcmp(buf.data(), magic, 4) == 0;
}

} // namespace

// ---- Dataset ---------------------------------------------------------------

void Dataset::validate() const {
    const std::size_t n = features.rows();
    const std::size_t c = c_all();

    if (labels.size() != n)
        throw DataError("dataset: " + std::to_string(labels.size()) + " labels for " +
                        std::to_string(n) + " feature rows");
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= c)
            throw DataError("dataset: sample " + std::to_string(i) + " has class " +
                            std::to_string(labels[i]) + " but attributes cover only [0, " +
                            std::to_string(c) + ")");

    std::vector<char> is_seen(c, 0), is_unseen(c, 0);
    for (int id : seen) {
        if (id < 0 || static_cast<std::size_t>(id) >= c)
            throw DataError("dataset: seen class " + std::to_string(id) + " has no attribute row");
        if (is_seen[static_cast<std::size_t>(id)]++)
            throw DataError("dataset: class " + std::to_string(id) + " listed twice as seen");
    }
    for (int id : unseen) {
        if (id < 0 || static_cast<std::size_t>(id) >= c)
            throw DataError("dataset: unseen class " + std::to_string(id) + " has no attribute row");
        if (is_unseen[static_cast<std::size_t>(id)]++)
            throw DataError("dataset: class " + std::to_string(id) + " listed twice as unseen");
        if (is_seen[static_cast<std::size_t>(id)])
            throw DataError("dataset: class " + std::to_string(id) + " is both seen and unseen");
    }

    // -1 = unassigned, otherwise the split that claimed the sample.
    constexpr std::array<const char*, 3> kSplitNames = {"train", "test_seen", "test_unseen"};
    std::vector<int> owner(n, -1);
    const std::array<const std::vector<std::size_t>*, 3> splits = {&train, &test_seen, &test_unseen};
    for (int s = 0; s < 3; ++s) {
        for (std::size_t idx : *splits[static_cast<std::size_t>(s)]) {
            if (idx >= n)
                throw DataError("dataset: " + std::string(kSplitNames[static_cast<std::size_t>(s)]) +
                                " split references sample " + std::to_string(idx) + " of " +
                                std::to_string(n));
            if (owner[idx] != -1) {
                const char* first = kSplitNames[static_cast<std::size_t>(owner[idx])];
                throw DataError("dataset: sample " + std::to_string(idx) + " appears in both " +
                                std::string(first) + " and " +
                                kSplitNames[static_cast<std::size_t>(s)] + " splits");
            }
            owner[idx] = s;
        }
    }

    auto check_membership = [&](const std::vector<std::size_t>& split, const char* split_name,
                                const std::vector<char>& allowed, const char* side) {
        for (std::size_t idx : split) {
            const int y = labels[idx];
            if (!allowed[static_cast<std::size_t>(y)])
                throw DataError("dataset: " + std::string(split_name) + " split sample " +
                                std::to_string(idx) + " has class " + std::to_string(y) +
                                " which is not " + side);
        }
    };
    check_membership(train, "train", is_seen, "a seen class");
    check_membership(test_seen, "test_seen", is_seen, "a seen class");
    check_membership(test_unseen, "test_unseen", is_unseen, "an unseen class");

    if (!all_finite(features))
        throw DataError("dataset: non-finite value in features");
    if (!all_finite(attributes))
        throw DataError("dataset: non-finite value in attributes");
}

void SynthConfig::validate() const {
    if (c_seen < 1 || c_unseen < 1)
        throw ConfigError("synthetic config: class counts must be >= 1");
    if (train_per_class < 1 || test_per_class < 1)
        throw ConfigError("synthetic config: per-class sample counts must be >= 1");
    if (d_v == 0 || d_s == 0)
        throw ConfigError("synthetic config: dimensions must be >= 1");
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw ConfigError("synthetic config: sigma must be finite and >= 0");
}

Matrix quantized_f32(const Matrix& m) {
    Matrix out = m;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = static_cast<double>(static_cast<float>(out.data()[i]));
    return out;
}

SynthOutput generate_synthetic_full(const SynthConfig& cfg) {
    cfg.validate();
    if (cfg.d_v < cfg.d_s)
        std::cerr << "warning: d_v (" << cfg.d_v << ") < d_s (" << cfg.d_s
                  << "); features will lose attribute information\n";

    const std::size_t c_seen = static_cast<std::size_t>(cfg.c_seen);
    const std::size_t c_all = c_seen + static_cast<std::size_t>(cfg.c_unseen);
    Rng rng(cfg.seed);

    // Unit-length attribute rows, stored at 32-bit precision.
    Matrix attrs(c_all, cfg.d_s);
    for (std::size_t c = 0; c < c_all; ++c) {
        double norm_sq = 0.0;
        for (std::size_t k = 0; k < cfg.d_s; ++k) {
            attrs(c, k) = rng.normal();
            norm_sq += attrs(c, k) * attrs(c, k);
        }
        const double norm = std::sqrt(norm_sq);
        if (norm > 0.0)
            for (std::size_t k = 0; k < cfg.d_s; ++k) attrs(c, k) /= norm;
    }
    attrs = quantized_f32(attrs);

    Matrix a(cfg.d_v, cfg.d_s);
    for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();

    const std::size_t n_train = c_seen * static_cast<std::size_t>(cfg.train_per_class);
    const std::size_t n_test_seen = c_seen * static_cast<std::size_t>(cfg.test_per_class);
    const std::size_t n_test_unseen =
        static_cast<std::size_t>(cfg.c_unseen) * static_cast<std::size_t>(cfg.test_per_class);
    const std::size_t n_total = n_train + n_test_seen + n_test_unseen;

    SynthOutput out;
    Dataset& ds = out.dataset;
    ds.features = Matrix(n_total, cfg.d_v);
    ds.labels.resize(n_total);
    ds.train.reserve(n_train);
    ds.test_seen.reserve(n_test_seen);
    ds.test_unseen.reserve(n_test_unseen);

    std::size_t next = 0;
    auto emit = [&](std::size_t cls, int count, std::vector<std::size_t>& split) {
        for (int s = 0; s < count; ++s) {
            for (std::size_t j = 0; j < cfg.d_v; ++j) {
                double base = 0.0;
                for (std::size_t k = 0; k < cfg.d_s; ++k) base += a(j, k) * attrs(cls, k);
                ds.features(next, j) = base + cfg.sigma * rng.normal();
            }
            ds.labels[next] = static_cast<int>(cls);
            split.push_back(next);
            ++next;
        }
    };
    for (std::size_t c = 0; c < c_seen; ++c) emit(c, cfg.train_per_class, ds.train);
    for (std::size_t c = 0; c < c_seen; ++c) emit(c, cfg.test_per_class, ds.test_seen);
    for (std::size_t c = c_seen; c < c_all; ++c) emit(c, cfg.test_per_class, ds.test_unseen);

    ds.features = quantized_f32(ds.features);
    ds.attributes = std::move(attrs);
    for (std::size_t c = 0; c < c_seen; ++c) ds.seen.push_back(static_cast<int>(c));
    for (std::size_t c = c_seen; c < c_all; ++c) ds.unseen.push_back(static_cast<int>(c));

    ds.validate();
    out.map_a = std::move(a);
    return out;
}

Dataset generate_synthetic(const SynthConfig& cfg) {
    return generate_synthetic_full(cfg).dataset;
}

// ---- matrix files ----------------------------------------------------------

void save_matrix(const fs::path& path, const Matrix& m) {
    if (m.rows() > 0xffffffffULL || m.cols() > 0xffffffffULL)
        throw DataError("save_matrix: dimensions exceed the format limit");
    std::string buf;
    buf.reserve(14 + m.size() * 4);
    buf.append(kMatrixMagic, 4);
    put_u16(buf, kMatrixVersion);
    put_u32(buf, static_cast<std::uint32_t>(m.rows()));
    put_u32(buf, static_cast<std::uint32_t>(m.cols()));
    for (std::size_t i = 0; i < m.size(); ++i)
        put_f32(buf, static_cast<float>(m.data()[i]));
    write_file(path, buf);
}

Matrix load_matrix(const fs::path& path) {
    const std::string buf = read_file(path);
    Reader r{buf, path.string()};
    if (!magic_matches(buf, kMatrixMagic))
        throw FormatError(r.name + ": bad magic, not a matrix file");
    r.pos = 4;
    const std::uint16_t version = r.u16();
    if (version != kMatrixVersion)
        throw FormatError(r.name + ": unsupported matrix format version " + std::to_string(version));
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    const std::uint64_t count = std::uint64_t(rows) * cols;
    if (r.remaining() % 4 != 0 || r.remaining() / 4 < count)
        throw FileError(r.name + ": truncated file (need " + std::to_string(count) + " values)");
    if (r.remaining() / 4 > count)
        throw FormatError(r.name + ": trailing bytes after payload");
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i)
        m.data()[i] = static_cast<double>(r.f32());
    return m;
}

// ---- labels files ----------------------------------------------------------

namespace {

std::vector<int> load_labels(const fs::path& path) {
    const std::string buf = read_file(path);
    std::istringstream in(buf);
    std::vector<int> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string where = path.string() + ":" + std::to_string(lineno);
        if (line.empty())
            throw FormatError(where + ": empty line in labels file");
        int value = 0;
        auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
        if (ec != std::errc{} || ptr != line.data() + line.size())
            throw FormatError(where + ": not an integer: \"" + line + "\"");
        out.push_back(value);
    }
    return out;
}

void standardize_features(Dataset& ds, const std::string& origin) {
    if (ds.train.empty())
        throw DataError(origin + ": standardize requested but the train split is empty");
    const std::size_t d = ds.d_v();
    const double n = static_cast<double>(ds.train.size());
    std::vector<double> mean(d, 0.0), sd(d, 0.0);
    for (std::size_t idx : ds.train)
        for (std::size_t j = 0; j < d; ++j) mean[j] += ds.features(idx, j);
    for (std::size_t j = 0; j < d; ++j) mean[j] /= n;
    for (std::size_t idx : ds.train)
        for (std::size_t j = 0; j < d; ++j) {
            const double c = ds.features(idx, j) - mean[j];
            sd[j] += c * c;
        }
    for (std::size_t j = 0; j < d; ++j) {
        sd[j] = std::sqrt(sd[j] / n);
        if (sd[j] < 1e-12) sd[j] = 1.0; // constant dimension: center only
    }
    for (std::size_t i = 0; i < ds.features.rows(); ++i)
        for (std::size_t j = 0; j < d; ++j)
            ds.features(i, j) = (ds.features(i, j) - mean[j]) / sd[j];
    ds.standardized = true;
}

} // namespace

// ---- dataset manifests -----------------------------------------------------

void save_dataset(const fs::path& dir, const Dataset& ds, bool standardize_flag) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw FileError("cannot create directory " + dir.string() + ": " + ec.message());

    save_matrix(dir / "features.zslm", ds.features);
    save_matrix(dir / "attributes.zslm", ds.attributes);

    std::string lbuf;
    for (int y : ds.labels) {
        lbuf += std::to_string(y);
        lbuf += '\n';
    }
    write_file(dir / "labels.txt", lbuf);

    nlohmann::json j = {
        {"format", "zsl-dataset"},
        {"version", 1},
        {"features", "features.zslm"},
        {"labels", "labels.txt"},
        {"attributes", "attributes.zslm"},
        {"seen", ds.seen},
        {"unseen", ds.unseen},
        {"splits",
         {{"train", ds.train}, {"test_seen", ds.test_seen}, {"test_unseen", ds.test_unseen}}},
        {"standardize", standardize_flag},
    };
    write_file(dir / "manifest.json", j.dump(2) + "\n");
}

Dataset load_dataset(const fs::path& manifest_path) {
    const std::string text = read_file(manifest_path);
    const std::string origin = manifest_path.string();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(origin + ": " + e.what());
    }

    Dataset ds;
    bool standardize = false;
    try {
        if (!j.is_object() || j.value("format", "") != "zsl-dataset")
            throw FormatError(origin + ": not a zsl-dataset manifest");
        if (j.value("version", 0) != 1)
            throw FormatError(origin + ": unsupported manifest version");
        for (const char* key : {"features", "labels", "attributes", "seen", "unseen", "splits"})
            if (!j.contains(key))
                throw FormatError(origin + ": manifest missing key \"" + key + "\"");

        const fs::path base = manifest_path.parent_path();
        ds.features = load_matrix(base / j.at("features").get<std::string>());
        ds.attributes = load_matrix(base / j.at("attributes").get<std::string>());
        ds.labels = load_labels(base / j.at("labels").get<std::string>());
        ds.seen = j.at("seen").get<std::vector<int>>();
        ds.unseen = j.at("unseen").get<std::vector<int>>();

        const auto& splits = j.at("splits");
        for (const char* key : {"train", "test_seen", "test_unseen"})
            if (!splits.contains(key))
                throw FormatError(origin + ": manifest missing split \"" + key + "\"");
        auto read_split = [&](const char* key) {
            std::vector<std::size_t> out;
            for (const auto& v : splits.at(key)) {
                const auto idx = v.get<long long>();
                if (idx < 0)
                    throw FormatError(origin + ": negative index in split \"" + std::string(key) +
                                      "\"");
                out.push_back(static_cast<std::size_t>(idx));
            }
            return out;
        };
        ds.train = read_split("train");
        ds.test_seen = read_split("test_seen");
        ds.test_unseen = read_split("test_unseen");
        standardize = j.value("standardize", false);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(origin + ": " + e.what());
    }

    ds.validate();
    if (standardize)
        standardize_features(ds, origin);
    return ds;
}

// ---- checkpoints ------------------------------------------------------------

namespace {

void put_param(std::string& buf, const char* name, const Param& p) {
    const std::size_t len = std::strlen(name);
    put_u8(buf, static_cast<std::uint8_t>(len));
    buf.append(name, len);
    put_u32(buf, static_cast<std::uint32_t>(p.value.rows()));
    put_u32(buf, static_cast<std::uint32_t>(p.value.cols()));
    for (std::size_t i = 0; i < p.value.size(); ++i) put_f64(buf, p.value.data()[i]);
    put_u64(buf, p.adam.t);
    for (std::size_t i = 0; i < p.adam.m.size(); ++i) put_f64(buf, p.adam.m.data()[i]);
    for (std::size_t i = 0; i < p.adam.v.size(); ++i) put_f64(buf, p.adam.v.data()[i]);
}

} // namespace

void save_checkpoint(const fs::path& path, const ModelParams& params, const HyperParams& hp,
                     int completed_iters) {
    std::string buf;
    buf.append(kCheckpointMagic, 4);
    put_u16(buf, kCheckpointVersion);
    put_f64(buf, hp.lambda);
    put_f64(buf, hp.eta);
    put_f64(buf, hp.lr);
    put_u64(buf, hp.embed_dim);
    put_i32(buf, hp.epochs);
    put_i32(buf, hp.rounds);
    put_i32(buf, hp.m0);
    put_u64(buf, hp.batch_size);
    put_u64(buf, hp.seed);
    put_u64(buf, params.d_v);
    put_u64(buf, params.d_s);
    put_u64(buf, params.embed_dim);
    put_u64(buf, params.hidden);
    put_u64(buf, params.c_all);
    put_i32(buf, completed_iters);
    put_u8(buf, 8);
    const auto ps = params.all();
    for (std::size_t i = 0; i < ps.size(); ++i)
        put_param(buf, kParamNames[i], *ps[i]);
    write_file(path, buf);
}

Checkpoint load_checkpoint(const fs::path& path) {
    const std::string buf = read_file(path);
    Reader r{buf, path.string()};
    if (!magic_matches(buf, kCheckpointMagic))
        throw FormatError(r.name + ": bad magic, not a checkpoint file");
    r.pos = 4;
    const std::uint16_t version = r.u16();
    if (version != kCheckpointVersion)
        throw FormatError(r.name + ": unsupported checkpoint version " + std::to_string(version));

    Checkpoint cp;
    cp.hp.lambda = r.f64();
    cp.hp.eta = r.f64();
    cp.hp.lr = r.f64();
    cp.hp.embed_dim = r.u64();
    cp.hp.epochs = r.i32();
    cp.hp.rounds = r.i32();
    cp.hp.m0 = r.i32();
    cp.hp.batch_size = r.u64();
    cp.hp.seed = r.u64();

    ModelParams& m = cp.params;
    m.d_v = r.u64();
    m.d_s = r.u64();
    m.embed_dim = r.u64();
    m.hidden = r.u64();
    m.c_all = r.u64();
    if (m.embed_dim != cp.hp.embed_dim)
        throw FormatError(r.name + ": embed_dim disagrees between hyperparameters and model dims");
    if (m.hidden != semantic_hidden_width(m.d_s, m.embed_dim))
        throw FormatError(r.name + ": inconsistent semantic hidden width");
    cp.completed_iters = r.i32();
    if (cp.completed_iters < 0)
        throw FormatError(r.name + ": negative completed iteration count");

    const std::uint8_t count = r.u8();
    if (count != 8)
        throw FormatError(r.name + ": expected 8 parameter blocks, found " + std::to_string(count));

    const std::array<std::pair<std::size_t, std::size_t>, 8> expected = {{
        {m.d_v, m.embed_dim},
        {1, m.embed_dim},
        {m.d_s, m.hidden},
        {1, m.hidden},
        {m.hidden, m.embed_dim},
        {1, m.embed_dim},
        {m.embed_dim, m.c_all},
        {1, m.c_all},
    }};

    const auto ps = m.all();
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const std::string name = r.bytes(r.u8());
        if (name != kParamNames[i])
            throw FormatError(r.name + ": parameter " + std::to_string(i) + " named \"" + name +
                              "\", expected \"" + kParamNames[i] + "\"");
        const std::size_t rows = r.u32();
        const std::size_t cols = r.u32();
        if (rows != expected[i].first || cols != expected[i].second)
            throw FormatError(r.name + ": parameter " + name + " has shape " + std::to_string(rows) +
                              "x" + std::to_string(cols) + ", expected " +
                              std::to_string(expected[i].first) + "x" +
                              std::to_string(expected[i].second));
        Param& p = *ps[i];
        p.value = Matrix(rows, cols);
        for (std::size_t k = 0; k < p.value.size(); ++k) p.value.data()[k] = r.f64();
        p.adam = AdamState::for_param(p.value);
        p.adam.t = r.u64();
        for (std::size_t k = 0; k < p.adam.m.size(); ++k) p.adam.m.data()[k] = r.f64();
        for (std::size_t k = 0; k < p.adam.v.size(); ++k) p.adam.v.data()[k] = r.f64();
    }
    r.expect_end();

    for (const Param* p : cp.params.all())
        if (!all_finite(p->value) || !all_finite(p->adam.m) || !all_finite(p->adam.v))
            throw FormatError(r.name + ": non-finite values in checkpoint");
    return cp;
}

} // namespace zsl
