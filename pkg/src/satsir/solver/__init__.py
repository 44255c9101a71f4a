from satsir.solver.cycles import (  # noqa: F401
    LimitCycle, OrbitStep, PlanarFlow, TimeDirection, detect_limit_cycle,
)
from satsir.solver.integrate import (  # noqa: F401
    DomainError, PreconditionError, Trajectory, default_portrait_inits,
    integrate, integrate_schedule, phase_portrait,
)
from satsir.solver.schedule import GammaSchedule, ScheduleError  # noqa: F401
from satsir.solver.stepper import DormandPrince, IntegrationError, StiffnessError  # noqa: F401
