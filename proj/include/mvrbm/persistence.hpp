#ifndef MVRBM_PERSISTENCE_HPP
#define MVRBM_PERSISTENCE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include "mvrbm/multimodal.hpp"
#include "mvrbm/rbm.hpp"

namespace mvrbm {

// Model artifact layout, little-endian throughout:
//   bytes 0-7   magic "MVRBM\0v1"
//   u32         kind (0 factored, 1 classic, 2 multimodal)
//   u32 shape   factored: I, J, K, L
//               classic:  visible_dim, hidden_dim
//               multimodal: I, J, K, L, channel count E, then H_e, W_e per channel
//   f64 payload row-major: U, V, B, C | W, b, c | U, V, B, C then Q_e, R_e, A_e
//   u64         CRC-64 (XZ polynomial) over every preceding byte
enum class ModelKind : std::uint32_t { mvrbm = 0, rbm = 1, mmvrbm = 2 };

using LoadedModel = std::variant<MvrbmParams, RbmParams, MultimodalParams>;

void save_model(const MvrbmParams& params, const std::string& path);
void save_model(const RbmParams& params, const std::string& path);
void save_model(const MultimodalParams& params, const std::string& path);

LoadedModel load_model(const std::string& path);
ModelKind loaded_kind(const LoadedModel& model);

// CRC-64/XZ: reflected polynomial 0xC96C5795D7870F42, init and xorout all-ones.
std::uint64_t crc64(const void* data, std::size_t size);

// Flat key=value configuration text; '#' starts a comment, blank lines skipped.
std::map<std::string, std::string> read_config(const std::string& path);

}  // namespace mvrbm

#endif
