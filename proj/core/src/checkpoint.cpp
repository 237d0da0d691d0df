#include "gazebc/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "gazebc/error.hpp"

namespace gazebc {

std::string policy_kind_name(PolicyKind kind) {
    return kind == PolicyKind::kEbm ? "ebm" : "mse";
}

PolicyKind parse_policy_kind(const std::string& name) {
    if (name == "ebm" || name == "ibc") return PolicyKind::kEbm;
    if (name == "mse") return PolicyKind::kMse;
    throw ValidationError("unknown policy kind: " + name);
}

namespace {

void write_doubles(std::ofstream& out, const std::vector<double>& values) {
    char buf[48];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%a", values[i]);
        out << buf << (i + 1 == values.size() ? "" : " ");
    }
    out << "\n";
}

std::vector<double> read_doubles(std::istream& in, std::size_t count,
                                 const std::filesystem::path& path) {
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::string token;
        if (!(in >> token)) throw ValidationError(path.string() + ": truncated checkpoint");
        char* end = nullptr;
        values[i] = std::strtod(token.c_str(), &end);
        if (end == token.c_str() || *end != '\0') {
            throw ValidationError(path.string() + ": bad number '" + token + "'");
        }
    }
    return values;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    checkpoint.config.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint: " + path.string());
    out << "gazebc-checkpoint " << kCheckpointFormatVersion << "\n";
    out << "kind " << policy_kind_name(checkpoint.kind) << "\n";
    out << "input_dim " << checkpoint.config.input_dim << "\n";
    out << "hidden";
    for (int h : checkpoint.config.hidden_dims) out << ' ' << h;
    out << "\n";
    out << "output_dim " << checkpoint.config.output_dim << "\n";
    out << "activation " << (checkpoint.config.activation == Activation::kRelu ? "relu" : "tanh")
        << "\n";
    {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%a", checkpoint.config.dropout_rate);
        out << "dropout " << buf << "\n";
    }
    out << "input_mean\n";
    write_doubles(out, checkpoint.stats.input_mean);
    out << "input_std\n";
    write_doubles(out, checkpoint.stats.input_std);
    out << "output_mean\n";
    write_doubles(out, checkpoint.stats.output_mean);
    out << "output_std\n";
    write_doubles(out, checkpoint.stats.output_std);
    out << "bounds\n";
    write_doubles(out, {checkpoint.bounds.min.yaw, checkpoint.bounds.min.pitch,
                        checkpoint.bounds.max.yaw, checkpoint.bounds.max.pitch});
    for (std::size_t l = 0; l < checkpoint.params.layers.size(); ++l) {
        const LayerParams& layer = checkpoint.params.layers[l];
        out << "layer " << l << " " << layer.rows << " " << layer.cols << "\n";
        write_doubles(out, layer.weights);
        write_doubles(out, layer.biases);
    }
    if (!out) throw IoError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path.string());

    auto expect = [&](const std::string& keyword) {
        std::string token;
        if (!(in >> token) || token != keyword) {
            throw ValidationError(path.string() + ": expected '" + keyword + "'" +
                                  (token.empty() ? "" : ", got '" + token + "'"));
        }
    };

    Checkpoint ckpt;
    expect("gazebc-checkpoint");
    int version = 0;
    in >> version;
    if (version != kCheckpointFormatVersion) {
        throw ValidationError(path.string() + ": unsupported checkpoint version " +
                              std::to_string(version));
    }
    std::string token;
    expect("kind");
    in >> token;
    ckpt.kind = parse_policy_kind(token);
    expect("input_dim");
    in >> ckpt.config.input_dim;
    expect("hidden");
    {
        std::string rest;
        std::getline(in, rest);
        std::istringstream hs(rest);
        ckpt.config.hidden_dims.clear();
        int h = 0;
        while (hs >> h) ckpt.config.hidden_dims.push_back(h);
    }
    expect("output_dim");
    in >> ckpt.config.output_dim;
    expect("activation");
    in >> token;
    if (token == "relu") {
        ckpt.config.activation = Activation::kRelu;
    } else if (token == "tanh") {
        ckpt.config.activation = Activation::kTanh;
    } else {
        throw ValidationError(path.string() + ": unknown activation '" + token + "'");
    }
    expect("dropout");
    ckpt.config.dropout_rate = read_doubles(in, 1, path)[0];
    ckpt.config.validate();

    expect("input_mean");
    ckpt.stats.input_mean = read_doubles(in, ckpt.config.input_dim, path);
    expect("input_std");
    ckpt.stats.input_std = read_doubles(in, ckpt.config.input_dim, path);
    expect("output_mean");
    ckpt.stats.output_mean = read_doubles(in, ckpt.config.output_dim, path);
    expect("output_std");
    ckpt.stats.output_std = read_doubles(in, ckpt.config.output_dim, path);
    expect("bounds");
    {
        const auto b = read_doubles(in, 4, path);
        ckpt.bounds.min = {b[0], b[1]};
        ckpt.bounds.max = {b[2], b[3]};
        ckpt.bounds.validate();
    }

    ckpt.params = MlpParams::zeros(ckpt.config);
    for (std::size_t l = 0; l < ckpt.params.layers.size(); ++l) {
        expect("layer");
        std::size_t index = 0;
        int rows = 0, cols = 0;
        in >> index >> rows >> cols;
        LayerParams& layer = ckpt.params.layers[l];
        if (index != l || rows != layer.rows || cols != layer.cols) {
            throw ValidationError(path.string() + ": layer header mismatch at layer " +
                                  std::to_string(l));
        }
        layer.weights = read_doubles(in, layer.weights.size(), path);
        layer.biases = read_doubles(in, layer.biases.size(), path);
    }
    return ckpt;
}

}  // namespace gazebc
