/* C interface for the bullwhip variance-analytics library.
 *
 * Maintained by hand alongside ../src/lib.rs; keep the two in sync.
 *
 * Conventions:
 *   - Fallible calls return BwStatus. On failure, bw_last_error_message()
 *     returns a thread-local message valid until the next failing call on
 *     the same thread.
 *   - Handles are opaque; create and destroy them only through this API.
 *     Passing a handle after freeing it is undefined behavior.
 *   - Value getters return NaN (doubles), 0 (sizes), or INT32_MIN (codes)
 *     when given a null handle.
 *   - Handles are not thread-safe; guard shared handles externally.
 */

#ifndef BULLWHIP_H
#define BULLWHIP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum BwStatus {
  BW_OK = 0,
  BW_NULL_POINTER = 1,
  BW_INVALID_ARGUMENT = 2,
  BW_INVALID_SERIES = 3,
  BW_INDIVISIBLE_LENGTH = 4,
  BW_LENGTH_MISMATCH = 5,
  BW_DEGENERATE_DEMAND = 6,
  BW_INSUFFICIENT_DATA = 7,
  BW_NUMERIC_FAILURE = 8,
  BW_PARSE_ERROR = 9,
  BW_IO_ERROR = 10,
} BwStatus;

typedef struct BwSeries BwSeries;
typedef struct BwAggregation BwAggregation;
typedef struct BwSeasonality BwSeasonality;
typedef struct BwSimRun BwSimRun;
typedef struct BwPanel BwPanel;

/* seasonal_period == 0 means no seasonal term; truncate_negative_orders is
 * a boolean flag (0 or 1). */
typedef struct BwSimConfig {
  size_t horizon;
  double phi;
  double mu;
  double sigma;
  size_t forecast_window;
  size_t lead_time;
  uint64_t seed;
  double seasonal_amplitude;
  size_t seasonal_period;
  int32_t truncate_negative_orders;
} BwSimConfig;

/* Library version as a static nul-terminated string. */
const char *bw_version(void);

/* Message of the most recent failure on this thread; empty before the
 * first failure. Valid until the next failing call on the same thread. */
const char *bw_last_error_message(void);

/* Series: finite observations, at least one. */
BwStatus bw_series_new(const double *values, size_t len, BwSeries **out);
void bw_series_free(BwSeries *series);
size_t bw_series_len(const BwSeries *series);
size_t bw_series_copy(const BwSeries *series, double *buf, size_t cap);

/* Var(orders) / Var(demand). */
BwStatus bw_bullwhip_ratio(const BwSeries *orders, const BwSeries *demand,
                           double *out);

/* Variance split over contiguous subsets of size k. Out-pointers may be
 * null to skip a component. */
BwStatus bw_decompose(const BwSeries *series, size_t k, double *total,
                      double *within, double *between);

/* Ratio comparison before and after summing blocks of k periods.
 * maintain_eps is the relative half-width of the band treated as no
 * movement. */
BwStatus bw_aggregation_new(const BwSeries *orders, const BwSeries *demand,
                            size_t k, double maintain_eps,
                            BwAggregation **out);
void bw_aggregation_free(BwAggregation *report);
double bw_aggregation_r_non_agg(const BwAggregation *report);
double bw_aggregation_r_agg(const BwAggregation *report);
double bw_aggregation_r_avg(const BwAggregation *report);
double bw_aggregation_r_within(const BwAggregation *report);
/* 1 increase, -1 decrease, 0 maintain; INT32_MIN on a null handle. */
int32_t bw_aggregation_effect(const BwAggregation *report);

/* Seasonal comparison. Nonzero shared removes the demand-fitted pattern
 * from both series; zero fits each series separately. */
BwStatus bw_seasonality_new(const BwSeries *orders, const BwSeries *demand,
                            size_t period, int32_t shared,
                            BwSeasonality **out);
void bw_seasonality_free(BwSeasonality *report);
double bw_seasonality_r_all(const BwSeasonality *report);
double bw_seasonality_r_adjusted(const BwSeasonality *report);
/* 1 above one, -1 below one, 0 equal; INT32_MIN on a null handle. */
int32_t bw_seasonality_relation(const BwSeasonality *report);

/* Simulation: AR(1) demand through an order-up-to policy. */
BwStatus bw_sim_config_default(BwSimConfig *out);
BwStatus bw_simulate(const BwSimConfig *config, BwSimRun **out);
void bw_sim_run_free(BwSimRun *run);
double bw_sim_run_ratio(const BwSimRun *run);
size_t bw_sim_run_len(const BwSimRun *run);
size_t bw_sim_run_demand(const BwSimRun *run, double *buf, size_t cap);
size_t bw_sim_run_orders(const BwSimRun *run, double *buf, size_t cap);

/* Multi-product pooling. Series are copied on add; the caller keeps
 * ownership of the handles passed in. bw_panel_pool sets *upper to NaN and
 * *has_upper to 0 when the demand covariance is singular, leaving the
 * pooled ratio unbounded above. Out-pointers may be null to skip a
 * value. */
BwStatus bw_panel_new(BwPanel **out);
void bw_panel_free(BwPanel *panel);
BwStatus bw_panel_add(BwPanel *panel, const char *name,
                      const BwSeries *demand, const BwSeries *orders);
BwStatus bw_panel_pool(const BwPanel *panel, double *pooled, double *weighted,
                       double *lower, double *upper, int32_t *has_upper);

#ifdef __cplusplus
}
#endif

#endif /* BULLWHIP_H */
