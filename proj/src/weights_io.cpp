#include <agmarl/weights_io.hpp>

#include <nlohmann/json.hpp>

#include <bit>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little, "container payload is little-endian");

namespace agmarl {

namespace {

void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
bool read_raw(std::istream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return is.gcount() == sizeof(v);
}

}  // namespace

void save_weights(const std::string& path, const TensorMap& tensors) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw WeightsError(WeightsError::Kind::Io, "cannot open for write: " + path);
    }
    os.write("AGMW", 4);
    write_u32(os, kWeightsVersion);
    for (const auto& [name, t] : tensors) {
        write_u32(os, static_cast<std::uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_u32(os, static_cast<std::uint32_t>(t.shape.size()));
        for (std::size_t d : t.shape) {
            write_u64(os, static_cast<std::uint64_t>(d));
        }
        os.write(reinterpret_cast<const char*>(t.data.data()),
                 static_cast<std::streamsize>(t.data.size() * sizeof(double)));
    }
    if (!os) {
        throw WeightsError(WeightsError::Kind::Io, "write failed: " + path);
    }
}

TensorMap load_weights(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw WeightsError(WeightsError::Kind::Io, "cannot open: " + path);
    }
    char magic[4] = {};
    is.read(magic, 4);
    if (is.gcount() != 4 || std::memcmp(magic, "AGMW", 4) != 0) {
        throw WeightsError(WeightsError::Kind::BadMagic, "not an AGMW container: " + path);
    }
    std::uint32_t version = 0;
    if (!read_raw(is, version)) {
        throw WeightsError(WeightsError::Kind::Truncated, "truncated header: " + path);
    }
    if (version != kWeightsVersion) {
        throw WeightsError(WeightsError::Kind::UnsupportedVersion,
                           "unsupported container version " + std::to_string(version));
    }
    TensorMap out;
    while (true) {
        std::uint32_t name_len = 0;
        is.read(reinterpret_cast<char*>(&name_len), sizeof(name_len));
        if (is.gcount() == 0) break;  // clean end of file
        if (is.gcount() != sizeof(name_len)) {
            throw WeightsError(WeightsError::Kind::Truncated, "truncated record header");
        }
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        if (is.gcount() != static_cast<std::streamsize>(name_len)) {
            throw WeightsError(WeightsError::Kind::Truncated, "truncated tensor name");
        }
        std::uint32_t rank = 0;
        if (!read_raw(is, rank) || rank > 8) {
            throw WeightsError(WeightsError::Kind::Truncated, "truncated or invalid rank for " + name);
        }
        Tensor t;
        std::size_t count = 1;
        for (std::uint32_t d = 0; d < rank; ++d) {
            std::uint64_t dim = 0;
            if (!read_raw(is, dim)) {
                throw WeightsError(WeightsError::Kind::Truncated, "truncated dims for " + name);
            }
            t.shape.push_back(static_cast<std::size_t>(dim));
            count *= static_cast<std::size_t>(dim);
        }
        if (count > (1u << 28)) {
            throw WeightsError(WeightsError::Kind::BadShape, "implausible tensor size for " + name);
        }
        t.data.resize(count);
        is.read(reinterpret_cast<char*>(t.data.data()),
                static_cast<std::streamsize>(count * sizeof(double)));
        if (is.gcount() != static_cast<std::streamsize>(count * sizeof(double))) {
            throw WeightsError(WeightsError::Kind::Truncated, "truncated payload for " + name);
        }
        out.emplace(std::move(name), std::move(t));
    }
    return out;
}

void save_weights_json(const std::string& path, const TensorMap& tensors) {
    nlohmann::json j;
    j["version"] = kWeightsVersion;
    nlohmann::json jt = nlohmann::json::object();
    for (const auto& [name, t] : tensors) {
        jt[name] = {{"shape", t.shape}, {"data", t.data}};
    }
    j["tensors"] = std::move(jt);
    std::ofstream os(path, std::ios::trunc);
    if (!os) {
        throw WeightsError(WeightsError::Kind::Io, "cannot open for write: " + path);
    }
    os << j.dump();
}

void collect_tensors(const ParamStore& store, TensorMap& out) {
    for (const ParamStore::Entry& e : store.entries()) {
        out[e.name] = Tensor::from(e.value, e.rank);
    }
}

void restore_tensors(ParamStore& store, const TensorMap& tensors) {
    for (ParamStore::Entry& e : store.entries()) {
        auto it = tensors.find(e.name);
        if (it == tensors.end()) {
            throw WeightsError(WeightsError::Kind::BadShape, "missing tensor: " + e.name);
        }
        Eigen::MatrixXd m = it->second.to_matrix();
        if (m.rows() != e.value.rows() || m.cols() != e.value.cols()) {
            throw WeightsError(WeightsError::Kind::BadShape, "shape mismatch for " + e.name);
        }
        e.value = std::move(m);
        e.grad.setZero();
    }
}

}  // namespace agmarl
