#ifndef SDNGUARD_H
#define SDNGUARD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum {
  SG_STATUS_OK = 0,
  SG_STATUS_NULL_ARGUMENT = 1,
  SG_STATUS_INVALID_ARGUMENT = 2,
  SG_STATUS_IO = 3,
  SG_STATUS_PARSE = 4,
  SG_STATUS_CONFIG = 5,
  SG_STATUS_MODEL = 6,
  SG_STATUS_PANIC = 7,
} SgStatus;

/**
 * Outcome of the two-layer detector.
 */
typedef struct SgDetection SgDetection;

/**
 * A generated trace together with the network its hosts live on.
 */
typedef struct SgScenario SgScenario;

/**
 * Result of a simulator run.
 */
typedef struct SgSimReport SgSimReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Error message of the last failed call on this thread; empty if none.
 * Valid until the next failing call on the same thread.
 */
const char *sg_last_error(void);

/**
 * Library version, static storage.
 */
const char *sg_version(void);

/**
 * Generates a scenario. `scenario_toml` may be null for defaults; the
 * network is a chain of `switches` switches over the scenario hosts.
 *
 * # Safety
 * `scenario_toml` is null or a valid C string; `out` is a valid pointer.
 */
SgStatus sg_scenario_generate(const char *scenario_toml,
                              uint64_t seed,
                              uint32_t switches,
                              SgScenario **out);

/**
 * Number of packets, 0 for a null handle.
 *
 * # Safety
 * `s` is null or a live handle.
 */
uint64_t sg_scenario_packet_count(const SgScenario *s);

/**
 * Number of hosts in the scenario network, 0 for a null handle.
 *
 * # Safety
 * `s` is null or a live handle.
 */
uint64_t sg_scenario_host_count(const SgScenario *s);

/**
 * Writes the trace as packet CSV with MAC columns.
 *
 * # Safety
 * `s` is a live handle; `path` is a valid C string.
 */
SgStatus sg_scenario_write_packets(const SgScenario *s, const char *path);

/**
 * # Safety
 * `s` is null or a handle from `sg_scenario_generate`, not used afterwards.
 */
void sg_scenario_free(SgScenario *s);

/**
 * Runs detection and identification on the scenario trace.
 * `pipeline_toml` may be null for defaults.
 *
 * # Safety
 * `s` is a live handle; `pipeline_toml` is null or a valid C string; `out`
 * is a valid pointer.
 */
SgStatus sg_detect(const SgScenario *s,
                   const char *pipeline_toml,
                   uint64_t seed,
                   SgDetection **out);

/**
 * Test-set F1 of detection (`stage` 0) or macro F1 of identification
 * (`stage` 1).
 *
 * # Safety
 * `d` is a live handle; `out` is a valid pointer.
 */
SgStatus sg_detection_f1(const SgDetection *d, uint32_t stage, double *out);

/**
 * Number of graph nodes.
 *
 * # Safety
 * `d` is null or a live handle.
 */
uint64_t sg_detection_node_count(const SgDetection *d);

/**
 * Distinct flagged source addresses, ascending.
 *
 * # Safety
 * `d` is null or a live handle.
 */
uint64_t sg_detection_suspicious_count(const SgDetection *d);

/**
 * Flagged address `index` as a host-order IPv4 integer.
 *
 * # Safety
 * `d` is a live handle; `out` is a valid pointer.
 */
SgStatus sg_detection_suspicious_ip(const SgDetection *d, uint64_t index, uint32_t *out);

/**
 * # Safety
 * `d` is null or a handle from `sg_detect`, not used afterwards.
 */
void sg_detection_free(SgDetection *d);

/**
 * Replays the scenario trace through its network. `sim_toml` may be null
 * for defaults; `feed_ips` (host-order IPv4, `feed_len` entries) may be
 * null when `feed_len` is 0, meaning no detector feed.
 *
 * # Safety
 * `s` is a live handle; `sim_toml` is null or a valid C string; `feed_ips`
 * points to `feed_len` integers; `out` is a valid pointer.
 */
SgStatus sg_simulate(const SgScenario *s,
                     const char *sim_toml,
                     bool mitigation,
                     const uint32_t *feed_ips,
                     size_t feed_len,
                     SgSimReport **out);

/**
 * Whether any 1 s window exceeded the Packet-In budget.
 *
 * # Safety
 * `r` is null or a live handle.
 */
bool sg_sim_overload(const SgSimReport *r);

/**
 * # Safety
 * `r` is null or a live handle.
 */
uint64_t sg_sim_peak_packet_in_rate(const SgSimReport *r);

/**
 * # Safety
 * `r` is null or a live handle.
 */
uint64_t sg_sim_forwarded(const SgSimReport *r);

/**
 * # Safety
 * `r` is null or a live handle.
 */
uint64_t sg_sim_block_count(const SgSimReport *r);

/**
 * # Safety
 * `r` is null or a live handle.
 */
uint64_t sg_sim_blocking_violations(const SgSimReport *r);

/**
 * Writes the per-second time series CSV.
 *
 * # Safety
 * `r` is a live handle; `path` is a valid C string.
 */
SgStatus sg_sim_write_timeseries(const SgSimReport *r, const char *path);

/**
 * # Safety
 * `r` is null or a handle from `sg_simulate`, not used afterwards.
 */
void sg_sim_free(SgSimReport *r);

/**
 * Parses a topology description; fails on disconnected graphs or
 * duplicate hosts. Only used for validation from C.
 *
 * # Safety
 * `text` is a valid C string; `hosts_out` is null or a valid pointer.
 */
SgStatus sg_topology_validate(const char *text, uint64_t *hosts_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SDNGUARD_H */
