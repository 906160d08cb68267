import numpy as np

# MASKS
MASK_THRESHOLD = 0.5
MASK_PNG_THRESHOLD = 128
MASK_PNG_FOREGROUND = 255

# BORDER CLASSES
BORDER_BIN_EDGES = (2, 5, 10)
DISTANCE_SENTINEL = int(np.iinfo(np.int32).max)

# LOSSES
LAMBDA_SEG = 0.8
PROB_EPS = 1e-7

# EVALUATION
BOUNDARY_TOL_FRACTION = 0.008
EARLY_CUT = 10
LATE_CUT = 20
LENGTH_MIN_LEN = 20
OCCLUSION_THRESHOLDS = (0, 50, 100)

# OVERLAYS
GROUND_TRUTH_COLOR = (0, 255, 0)
PREDICTION_COLOR = (255, 0, 0)
OVERLAY_ALPHA = 0.5

# ENCODER
ENCODER_STAGES = 5
ENCODER_STRIDE = 2 ** ENCODER_STAGES
