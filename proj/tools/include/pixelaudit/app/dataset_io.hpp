#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pixelaudit/image.hpp"
#include "pixelaudit/perturb.hpp"

namespace pixelaudit::app {

struct LoadedDataset {
  std::vector<ImageRecord> images;                          // sorted by id
  std::vector<std::pair<std::string, std::string>> invalid;  // id, reason
};

bool has_image_extension(const std::filesystem::path& path);
// Image files directly inside `dir`, sorted by name.
std::vector<std::filesystem::path> list_image_files(const std::filesystem::path& dir);
// Ids are file names. Throws std::runtime_error for a missing directory.
LoadedDataset load_directory(const std::filesystem::path& dir);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

void write_dataset_pngs(const std::vector<ImageRecord>& images, const std::filesystem::path& dir);

// labels.csv: id,labels,duplicate_of with labels joined by ';'.
void write_labels(const LabeledDataset& data, const std::filesystem::path& path);

struct LabelTable {
  std::map<std::string, std::vector<std::string>> labels;
  std::map<std::string, std::string> duplicate_of;
};
LabelTable read_labels(const std::filesystem::path& path);

}  // namespace pixelaudit::app
