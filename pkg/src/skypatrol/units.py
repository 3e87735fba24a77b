"""Unit conversions.

All internal arithmetic is in feet / seconds; interfaces report miles,
feet and mph to match highway operations conventions.
"""

FEET_PER_MILE = 5280.0
MPH_TO_FTPS = FEET_PER_MILE / 3600.0  # 1.4667 ft/s per mph


def mph_to_ftps(v: float) -> float:
    return v * MPH_TO_FTPS


def ftps_to_mph(v: float) -> float:
    return v / MPH_TO_FTPS


def miles_to_feet(d: float) -> float:
    return d * FEET_PER_MILE


def feet_to_miles(d: float) -> float:
    return d / FEET_PER_MILE
