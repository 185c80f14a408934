#include "pixelaudit/app/dataset_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pixelaudit/app/csv.hpp"
#include "pixelaudit/error.hpp"
#include "pixelaudit/imaging.hpp"

namespace fs = std::filesystem;

namespace pixelaudit::app {

bool has_image_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  static const char* kExts[] = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff",
                                ".webp", ".pgm", ".ppm", ".pnm"};
  return std::any_of(std::begin(kExts), std::end(kExts), [&](const char* e) { return ext == e; });
}

std::vector<fs::path> list_image_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && has_image_extension(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return files;
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_file(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  write_file(path, std::string(bytes.begin(), bytes.end()));
}

LoadedDataset load_directory(const fs::path& dir) {
  LoadedDataset out;
  for (const auto& file : list_image_files(dir)) {
    const std::string id = file.filename().string();
    try {
      out.images.push_back(load_image(file.string(), id));
    } catch (const Error& e) {
      out.invalid.emplace_back(id, e.what());
    }
  }
  return out;
}

void write_dataset_pngs(const std::vector<ImageRecord>& images, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& image : images) write_file(dir / image.id, encode_png(image));
}

void write_labels(const LabeledDataset& data, const fs::path& path) {
  std::ostringstream out;
  write_csv_row(out, {"id", "labels", "duplicate_of"});
  for (const auto& [id, tokens] : data.labels) {
    std::string joined;
    for (const auto& t : tokens) joined += (joined.empty() ? "" : ";") + t;
    auto dup = data.duplicate_of.find(id);
    write_csv_row(out, {id, joined, dup == data.duplicate_of.end() ? "" : dup->second});
  }
  write_file(path, out.str());
}

LabelTable read_labels(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  auto rows = read_csv(in);
  if (rows.empty() || rows[0].empty() || rows[0][0] != "id") {
    throw std::runtime_error(path.string() + ": missing 'id' header");
  }
  LabelTable table;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto& tokens = table.labels[row[0]];
    if (row.size() > 1 && !row[1].empty()) {
      std::stringstream ss(row[1]);
      for (std::string t; std::getline(ss, t, ';');) {
        if (!t.empty()) tokens.push_back(t);
      }
    }
    if (row.size() > 2 && !row[2].empty()) table.duplicate_of[row[0]] = row[2];
  }
  return table;
}

}  // namespace pixelaudit::app
