"""varmono: integrability certificates, cotangent lifts, variational
equations and monodromy sampling for analytic vector fields."""

__version__ = "0.1.0"
