#include "morl/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace morl {

namespace {

constexpr char kMagic[8] = {'M', 'O', 'R', 'L', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;

void write_u32(std::ostream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void write_i64(std::ostream& os, int64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void write_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

void write_string(std::ostream& os, const std::string& s) {
    write_u32(os, static_cast<uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void write_doubles(std::ostream& os, const std::vector<double>& v) {
    write_i64(os, static_cast<int64_t>(v.size()));
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void write_tensor(std::ostream& os, const Tensor& t) {
    write_u32(os, static_cast<uint32_t>(t.shape.size()));
    for (int d : t.shape) write_u32(os, static_cast<uint32_t>(d));
    write_doubles(os, t.data);
}

uint32_t read_u32(std::istream& is) {
    uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    require(bool(is), "checkpoint truncated");
    return v;
}

int64_t read_i64(std::istream& is) {
    int64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    require(bool(is), "checkpoint truncated");
    return v;
}

double read_f64(std::istream& is) {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    require(bool(is), "checkpoint truncated");
    return v;
}

std::string read_string(std::istream& is) {
    uint32_t n = read_u32(is);
    std::string s(n, '\0');
    is.read(s.data(), n);
    require(bool(is), "checkpoint truncated");
    return s;
}

std::vector<double> read_doubles(std::istream& is) {
    int64_t n = read_i64(is);
    require(n >= 0, "checkpoint corrupt: negative array length");
    std::vector<double> v(static_cast<size_t>(n));
    is.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
    require(bool(is), "checkpoint truncated");
    return v;
}

Tensor read_tensor(std::istream& is) {
    uint32_t rank = read_u32(is);
    std::vector<int> shape(rank);
    for (auto& d : shape) d = static_cast<int>(read_u32(is));
    std::vector<double> data = read_doubles(is);
    return Tensor(std::move(shape), std::move(data));
}

}  // namespace

void save_checkpoint(const std::string& path, const ParamTree& params,
                     std::span<const AdamState> optimizers,
                     const std::map<std::string, std::vector<double>>& extras) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        require(bool(os), "cannot open '" + tmp + "' for writing");
        os.write(kMagic, sizeof(kMagic));
        write_u32(os, kVersion);

        write_u32(os, static_cast<uint32_t>(params.entries().size()));
        for (const auto& e : params.entries()) {
            write_string(os, e.name);
            write_tensor(os, e.value);
        }
        write_i64(os, params.step_count);

        write_u32(os, static_cast<uint32_t>(optimizers.size()));
        for (const auto& opt : optimizers) {
            const AdamConfig& c = opt.config();
            write_f64(os, c.lr);
            write_f64(os, c.beta1);
            write_f64(os, c.beta2);
            write_f64(os, c.eps);
            write_f64(os, c.weight_decay);
            write_u32(os, static_cast<uint32_t>(c.scope));
            write_i64(os, opt.steps_taken());
            write_u32(os, static_cast<uint32_t>(opt.moments().size()));
            for (const auto& m : opt.moments()) {
                write_tensor(os, m.m);
                write_tensor(os, m.v);
            }
        }

        write_u32(os, static_cast<uint32_t>(extras.size()));
        for (const auto& [key, vals] : extras) {
            write_string(os, key);
            write_doubles(os, vals);
        }
        require(bool(os), "write to '" + tmp + "' failed");
    }
    require(std::rename(tmp.c_str(), path.c_str()) == 0,
            "cannot move checkpoint into place at '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    require(bool(is), "cannot open checkpoint '" + path + "'");
    char magic[8];
    is.read(magic, 8);
    require(bool(is) && std::memcmp(magic, kMagic, 8) == 0,
            "'" + path + "' is not a checkpoint file");
    uint32_t version = read_u32(is);
    require(version == kVersion,
            "unsupported checkpoint version " + std::to_string(version));

    Checkpoint ckpt;
    uint32_t n_entries = read_u32(is);
    for (uint32_t i = 0; i < n_entries; ++i) {
        std::string name = read_string(is);
        ckpt.params.add(name, read_tensor(is));
    }
    ckpt.params.step_count = read_i64(is);

    uint32_t n_opts = read_u32(is);
    for (uint32_t i = 0; i < n_opts; ++i) {
        AdamConfig cfg;
        cfg.lr = read_f64(is);
        cfg.beta1 = read_f64(is);
        cfg.beta2 = read_f64(is);
        cfg.eps = read_f64(is);
        cfg.weight_decay = read_f64(is);
        cfg.scope = static_cast<ParamScope>(read_u32(is));
        AdamState state(cfg);
        state.set_steps_taken(read_i64(is));
        uint32_t n_moments = read_u32(is);
        state.moments().resize(n_moments);
        for (uint32_t j = 0; j < n_moments; ++j) {
            state.moments()[j].m = read_tensor(is);
            state.moments()[j].v = read_tensor(is);
        }
        ckpt.optimizers.push_back(std::move(state));
    }

    uint32_t n_extras = read_u32(is);
    for (uint32_t i = 0; i < n_extras; ++i) {
        std::string key = read_string(is);
        ckpt.extras[key] = read_doubles(is);
    }
    return ckpt;
}

void apply_checkpoint_params(const Checkpoint& ckpt, ParamTree& params) {
    require(ckpt.params.entries().size() == params.entries().size(),
            "checkpoint holds " + std::to_string(ckpt.params.entries().size()) +
                " entries but the model expects " + std::to_string(params.entries().size()));
    for (auto& e : params.entries()) {
        const ParamEntry& src = ckpt.params.at(e.name);
        require(src.value.same_shape(e.value),
                "checkpoint entry '" + e.name + "' has shape " + src.value.shape_str() +
                    " but the model expects " + e.value.shape_str());
        e.value = src.value;
    }
    params.step_count = ckpt.params.step_count;
}

}  // namespace morl
