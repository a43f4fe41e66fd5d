#include "qcs/logprob.hpp"

#include <atomic>
#include <memory>
#include <mutex>
#include <vector>

namespace qcs {

namespace {

std::shared_ptr<const std::vector<double>> g_table =
    std::make_shared<const std::vector<double>>(std::vector<double>{0.0});
std::mutex g_table_mutex;

std::shared_ptr<const std::vector<double>> table_at_least(std::size_t size) {
  auto current = std::atomic_load(&g_table);
  if (current->size() >= size) return current;

  std::lock_guard<std::mutex> lock(g_table_mutex);
  current = std::atomic_load(&g_table);
  if (current->size() >= size) return current;

  std::size_t grown = current->size();
  while (grown < size) grown = grown * 2 + 256;

  std::vector<double> next(grown);
  long double acc = 0.0L;
  next[0] = 0.0;
  for (std::size_t k = 1; k < grown; ++k) {
    acc += std::log(static_cast<long double>(k));
    next[k] = static_cast<double>(acc);
  }
  auto fresh = std::make_shared<const std::vector<double>>(std::move(next));
  std::atomic_store(&g_table, fresh);
  return fresh;
}

}  // namespace

double log_factorial(long long n) {
  if (n <= 0) return 0.0;
  auto table = table_at_least(static_cast<std::size_t>(n) + 1);
  return (*table)[static_cast<std::size_t>(n)];
}

double log_binom_coeff(long long n, long long k) {
  if (k < 0 || n < 0 || k > n) {
    return -std::numeric_limits<double>::infinity();
  }
  if (k == 0 || k == n) return 0.0;
  auto table = table_at_least(static_cast<std::size_t>(n) + 1);
  const auto& lf = *table;
  return lf[static_cast<std::size_t>(n)] - lf[static_cast<std::size_t>(k)] -
         lf[static_cast<std::size_t>(n - k)];
}

}  // namespace qcs
