"""Integer codes and packed-parameter layouts shared by both kernel backends.

Noise params layout (float64 array):
  gaussian              [sigma]
  pareto_symmetric      [alpha, u0]
  alpha_stable          [alpha]
  double_exponential    [alpha_param, beta_param, q, r]
  log_corrected_pareto  [alpha, tail_coef]  + inverse-CDF table arrays
  none                  []

Landscape params layout:
  double_well           []                      f' = 4x(x^2-1), clamped to +-24 outside [-2,2]
  vshape                [c_l, c_r, delta, outer_slope]
  k_critical            [K, c, a, delta, flank] f' = (K+1) a (x-c)^K on the window
  linear                [slope]                 f' = slope everywhere (test helper)
"""

NOISE_GAUSSIAN = 0
NOISE_PARETO = 1
NOISE_STABLE = 2
NOISE_DEXP = 3
NOISE_LOGP = 4
NOISE_NONE = 5

LAND_DOUBLE_WELL = 0
LAND_VSHAPE = 1
LAND_KCRITICAL = 2
LAND_LINEAR = 3

START_POINT = 0
START_UNIFORM = 1

STOP_FIXED = 0
STOP_EXIT = 1

OVERFLOW_LIMIT = 1e300
