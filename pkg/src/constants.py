"""Application constants to avoid magic numbers and strings."""
from datetime import date

# Food code
CRITICAL_CODES = range(1, 15)
SERIOUS_CODES = range(15, 30)
MINOR_CODES = range(30, 46)
MIN_VIOLATION_CODE = 1
MAX_VIOLATION_CODE = 45

# Records on or after this date use the 2018 food code and are excluded
FOOD_CODE_CUTOFF = date(2018, 7, 1)

# Calendar
DAYS_PER_YEAR = 365.25
DATE_FORMAT = "%Y-%m-%d"
PORTAL_DATE_FORMAT = "%m/%d/%Y"
MONTH_FORMAT = "%Y-%m"

# Default train/test windows of the released data
DEFAULT_TRAIN_START = date(2011, 9, 1)
DEFAULT_TRAIN_END = date(2014, 4, 30)
DEFAULT_TEST_START = date(2014, 9, 1)
DEFAULT_TEST_END = date(2014, 10, 31)

# Model deployment date used by the pre/post comparison
DEFAULT_SPLIT_DATE = date(2015, 1, 1)

# Kernel density features
DEFAULT_BANDWIDTH_METERS = 1000.0
DEFAULT_WINDOW_DAYS = 90
EARTH_RADIUS_METERS = 6_371_008.8

# Missing previous inspection: longest routine cycle is once every other year
DEFAULT_IMPUTATION_YEARS = 2.0
LICENSE_AGE_THRESHOLD_YEARS = 4.0

# Weather
MIN_TMAX_F = -60.0
MAX_TMAX_F = 130.0

# Training
DEFAULT_MAX_ITERATIONS = 50
DEFAULT_GRADIENT_TOLERANCE = 1e-8
DEFAULT_RIDGE_EPSILON = 1e-8
SEPARATION_COEFFICIENT_LIMIT = 30.0
# Fitted probability this close to an observed label means the classes are separated
SEPARATION_PROBABILITY_TOLERANCE = 1e-6
MAX_STEP_HALVINGS = 30
WALD_Z_95 = 1.959963984540054

# Sanitarian clusters, highest mean coefficient first
CLUSTER_COLORS = ("purple", "blue", "orange", "green", "yellow", "brown")
DEFAULT_CLUSTER_COUNT = 6
UNCLUSTERED_GROUP = "unclustered"

# Feature layout of the production model
BASE_FEATURE_NAMES = (
    "past_serious",
    "past_critical",
    "time_since_last",
    "age_over_4y",
    "alcohol",
    "tobacco",
    "tmax_f",
    "burglary_kde",
    "sanitation_kde",
    "garbage_kde",
)
CLUSTER_FEATURE_NAMES = tuple(f"cluster_{color}" for color in CLUSTER_COLORS)
FEATURE_NAMES = BASE_FEATURE_NAMES + CLUSTER_FEATURE_NAMES
SANITARIAN_FEATURE_PREFIX = "sanitarian_"

# Coefficients of the deployed city model (intercept unpublished)
CITY_MODEL_COEFFICIENTS = {
    "cluster_purple": 1.555,
    "cluster_blue": 0.950,
    "cluster_orange": 0.202,
    "cluster_green": -0.244,
    "cluster_yellow": -0.697,
    "cluster_brown": -1.306,
    "past_serious": 0.302,
    "past_critical": 0.427,
    "time_since_last": 0.097,
    "age_over_4y": -0.164,
    "alcohol": 0.411,
    "tobacco": 0.171,
    "tmax_f": 0.005,
    "burglary_kde": 0.002,
    "sanitation_kde": 0.002,
    "garbage_kde": -0.004,
}

# Scheduling
DEFAULT_RANDOM_REPLICATES = 100

# Audit
DEFAULT_TOP_CHAINS = 51
TEMPERATURE_SENSITIVE_CODES = (2, 3)
DISPLAY_DECIMALS = 3

# Short titles of the critical codes
CRITICAL_CODE_TITLES = {
    1: "FOOD SOURCE, SPOILAGE, LABELS",
    2: "FOOD STORAGE FACILITIES",
    3: "FOOD TEMPERATURE REQUIREMENT",
    4: "CROSS CONTAMINATION PREVENTION",
    5: "PERSONNEL WITH INFECTIONS RESTRICTED",
    6: "EMPLOYEE HANDWASHING AND HYGIENE",
    7: "WASH AND RINSE CYCLE TEMPERATURE",
    8: "RINSE CYCLE SANITIZING SOLUTION",
    9: "CONNECTION TO CITY WATER SUPPLY",
    10: "SEWAGE AND WASTE WATER DISPOSAL",
    11: "ADEQUATE TOILET FACILITIES",
    12: "ADEQUATE HAND WASHING FACILITIES",
    13: "NO RODENTS, INSECTS, OR ANIMALS",
    14: "PREVIOUS SERIOUS VIOLATION CORRECTED",
}

# Violation text format
VIOLATION_DELIMITER = "|"
VIOLATION_COMMENT_MARKER = " - Comments:"

# Inspection type aliases (matched case-insensitively, whitespace collapsed)
INSPECTION_TYPE_ALIASES = {
    "canvass": "canvass",
    "canvas": "canvass",
    "routine canvass": "canvass",
    "complaint": "complaint",
    "short form complaint": "complaint",
    "suspected food poisoning": "complaint",
    "license": "license",
    "license task force": "license",
    "reinspection": "reinspection",
    "re-inspection": "reinspection",
    "canvass re-inspection": "reinspection",
    "complaint re-inspection": "reinspection",
    "license re-inspection": "reinspection",
    "suspected food poisoning re-inspection": "reinspection",
    "other": "other",
}

# File names per subcommand
INGEST_SUMMARY_FILE = "ingest_summary.json"
PORTAL_SUMMARY_FILE = "portal_summary.json"
MONTHLY_COUNTS_FILE = "monthly_counts.csv"
FEATURES_FILE = "features.csv"
DATASET_SUMMARY_FILE = "dataset_summary.json"
MODEL_FILE = "model.json"
FULL_MODEL_FILE = "full_model.json"
CLUSTERED_MODEL_FILE = "clustered_model.json"
SANITARIAN_CLUSTERS_FILE = "sanitarian_clusters.csv"
CLUSTERED_FEATURES_FILE = "features_clustered.csv"
ODDS_RATIOS_FILE = "odds_ratios.csv"
SCORES_FILE = "scores.csv"
METRICS_FILE = "metrics.json"
HIT_CURVE_FILE = "hitcurve.csv"
SCHEDULE_FILE_TEMPLATE = "schedule_{strategy}.csv"
CLUSTER_HIT_RATES_FILE = "cluster_hit_rates.csv"
CODE_FREQUENCIES_FILE = "code_frequencies.csv"
CODES_BY_CLUSTER_FILE = "code_hit_rates_by_cluster.csv"
MONTHLY_HIT_RATES_FILE = "monthly_hit_rates.csv"
PREPOST_MONTHLY_FILE = "prepost_monthly.csv"
PREPOST_SUMMARY_FILE = "prepost_summary.csv"
SEASONAL_FILE = "seasonal_association.json"
COUNTERFACTUAL_FILE = "counterfactual.csv"
CLUSTER_POSITIONS_FILE = "cluster_positions.csv"
AUDIT_SUMMARY_TEMPLATE = "audit_{name}_summary.json"
SYNTH_MANIFEST_FILE = "manifest.json"
SYNTH_CONFIG_FILE = "run.conf"
REPORT_DIR = "report"
REPORT_INDEX_FILE = "index.json"

INSPECTIONS_FILE = "inspections.csv"
LICENSES_FILE = "licenses.csv"
WEATHER_FILE = "weather.csv"
EVENTS_FILE = "events.csv"

# Exit statuses
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3

# Logging
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_DATE_FORMAT = '%Y-%m-%d %H:%M:%S'
