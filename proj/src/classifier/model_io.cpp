#include "classifier/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace tubeloc::classifier {

namespace {

static_assert(std::endian::native == std::endian::little,
              "model file i/o assumes a little-endian host");

void put_i32(std::ofstream& out, std::int32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
std::int32_t get_i32(std::ifstream& in) {
  std::int32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
void put_f64(std::ofstream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
double get_f64(std::ifstream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

void write_model(const std::string& path, const EmbedModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("write_model: cannot open " + path);
  out.write(kModelMagic, static_cast<std::streamsize>(std::strlen(kModelMagic)));
  out.put('\n');
  put_i32(out, model.arch.input_size);
  put_i32(out, model.arch.c1);
  put_i32(out, model.arch.c2);
  put_i32(out, model.arch.c3);
  put_i32(out, model.arch.embed_dim);
  put_f64(out, model.margin);
  const NetDims dims(model.arch);
  put_i32(out, static_cast<std::int32_t>(dims.total));
  out.write(reinterpret_cast<const char*>(model.params.data()),
            static_cast<std::streamsize>(model.params.size() * sizeof(double)));
  if (!out)
    throw std::runtime_error("write_model: write failed for " + path);
}

EmbedModel read_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("read_model: cannot open " + path);
  std::string magic(std::strlen(kModelMagic), '\0');
  in.read(magic.data(), static_cast<std::streamsize>(magic.size()));
  if (!in || magic != kModelMagic || in.get() != '\n')
    throw std::runtime_error("read_model: bad magic in " + path);
  EmbedModel m;
  m.arch.input_size = get_i32(in);
  m.arch.c1 = get_i32(in);
  m.arch.c2 = get_i32(in);
  m.arch.c3 = get_i32(in);
  m.arch.embed_dim = get_i32(in);
  m.margin = get_f64(in);
  const std::int32_t count = get_i32(in);
  const NetDims dims(m.arch);
  if (!in || count != static_cast<std::int32_t>(dims.total))
    throw std::runtime_error("read_model: parameter count mismatch in " + path);
  m.params.resize(dims.total);
  in.read(reinterpret_cast<char*>(m.params.data()),
          static_cast<std::streamsize>(m.params.size() * sizeof(double)));
  if (!in)
    throw std::runtime_error("read_model: truncated parameters in " + path);
  return m;
}

}  // namespace tubeloc::classifier
