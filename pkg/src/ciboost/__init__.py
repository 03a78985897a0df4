"""Simulation and control-design toolkit for a coupled-inductor multi-port
boost converter: closed-form phase-shift power transfer, small-signal PI
design, switched-circuit time-domain simulation, and scripted studies."""

from .control import ControlStack, PiState, SupervisorPlan, pi_step, supervisor_step
from .measurements import AnalysisReport, average_power, measure_ripple
from .modulation import GateSchedule, SwitchState, build_schedule, region_of, state_at
from .params import (
    ConverterParams,
    ModulationCommand,
    OperatingPoint,
    table2_defaults,
    table3_defaults,
    validate,
)
from .power_transfer import (
    BoundaryCurrents,
    RegionCoefficients,
    aux_power,
    boundary_currents,
    power_curve,
    region_coefficients,
    region_schedule,
)
from .scenarios import ScenarioConfig, load_scenario, run_scenario
from .simulator import (
    AffineModel,
    StateVector,
    integrate_step,
    resolve_network,
    run_open_loop,
    run_with_controller,
)
from .smallsignal import (
    AuxPlant,
    BoostPlant,
    LoopDesign,
    aux_plant,
    boost_plant,
    design_aux_loop,
    design_main_loop,
    gvd_magnitude,
)
from .waveforms import Waveform, emit_csv

__version__ = "0.1.0"
