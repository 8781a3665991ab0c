#pragma once

#include <fstream>
#include <string>

#include "edpm/chain.hpp"

namespace edpm {

// One draw as a single JSON line. Labels are written 1-based; urn draws
// carry `"representation": "urn"`.
std::string draw_to_json(const ChainDraw& draw);
ChainDraw draw_from_json(const std::string& line);

// Trace CSV: iter,alpha_theta,alpha_psi_max,clusters,occupancy where
// occupancy lists the theta-cluster sizes joined by ';'.
std::string trace_header();
std::string trace_row(const ChainDraw& draw);

// Streams draws to a JSONL file and, optionally, the trace CSV. Each draw is
// flushed so an interrupted run keeps what it wrote.
class ChainWriter {
 public:
  ChainWriter(const std::string& jsonl_path, const std::string& trace_path = {});

  void write(const ChainDraw& draw);
  std::size_t written() const { return written_; }

 private:
  std::ofstream jsonl_;
  std::ofstream trace_;
  bool has_trace_ = false;
  std::size_t written_ = 0;
};

Chain read_chain_jsonl(const std::string& path);

// Reads a JSONL chain one line at a time without holding it in memory.
std::size_t for_each_draw(const std::string& path, const DrawObserver& observer);

}  // namespace edpm
