"""Experiment campaigns built on the simulation chain."""

from __future__ import annotations

from glvsim.analyses.common import CampaignResult, parallel_map
from glvsim.analyses.end_to_end import (run_alarm_map, run_distance_sweep, run_point_to_point,
                                        run_single_glv_comparison)
from glvsim.analyses.frequency import default_frequencies, run_frequency_response
from glvsim.analyses.pilot import PilotConfig, run_linearity_pilot, run_sensitivity_heatmap


def _substeps(setup) -> int:
    return setup.raw["receiver"]["substeps"]


def pilot_configs(setup) -> list[PilotConfig]:
    c = setup.campaign("linearity_pilot")
    return [PilotConfig(mode, inputs, tuple(c["scaling_factors"]), float(d), c["baseline"],
                        c["pulse_on_s"], c["pulse_off_s"], setup.sample_rate_hz, _substeps(setup))
            for mode in c["modes"] for inputs in c["inputs"] for d in c["durations_s"]]


def run_campaign(setup, workers: int = 1) -> CampaignResult:
    """Run the campaign named by ``setup.scenario``."""
    name = setup.scenario
    if name == "point_to_point":
        return run_point_to_point(setup)
    if name == "linearity_pilot":
        return run_linearity_pilot(pilot_configs(setup), setup.receiver_params(), workers)
    if name == "frequency_response":
        c = setup.campaign(name)
        return run_frequency_response(default_frequencies(c["f_min_hz"], c["f_max_hz"], c["n_freqs"]),
                                      c["molecules"], c["amplitude"], setup.receiver_params(),
                                      setup.sample_rate_hz, c["min_periods"], c["settle_s"],
                                      c["discard_fraction"], workers, _substeps(setup))
    if name == "sensitivity_heatmap":
        c = setup.campaign(name)
        lp = setup.campaign("linearity_pilot")
        cfg = PilotConfig(c["mode"], c["input"], (c["scaling_factor"],), c["duration_s"], lp["baseline"],
                          lp["pulse_on_s"], lp["pulse_off_s"], setup.sample_rate_hz, _substeps(setup))
        return run_sensitivity_heatmap(c["scale_85A"], c["scale_91R"], setup.receiver_params(), cfg,
                                       c["scaling_factor"], workers)
    if name == "distance_sweep":
        return run_distance_sweep(setup, trajectories=setup.raw["output"]["trajectories"])
    if name == "alarm_map":
        return run_alarm_map(setup, workers=workers)
    if name == "single_glv_comparison":
        return run_single_glv_comparison(setup)
    raise ValueError(f"unknown scenario {name!r}")


__all__ = ["CampaignResult", "PilotConfig", "default_frequencies", "parallel_map", "pilot_configs",
           "run_alarm_map", "run_campaign", "run_distance_sweep", "run_frequency_response",
           "run_linearity_pilot", "run_point_to_point", "run_sensitivity_heatmap",
           "run_single_glv_comparison"]
