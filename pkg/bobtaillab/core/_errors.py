class BobtailError(Exception): ...


class DomainError(BobtailError, ValueError): ...


class ConvergenceError(BobtailError, ArithmeticError): ...


class SerializationError(BobtailError): ...


class BountyError(BobtailError): ...


class ConfigError(BobtailError): ...


class SimulationError(BobtailError): ...


class EventOrderError(SimulationError): ...


def require(condition: bool, message: str, /, *, error: type[BobtailError] = DomainError) -> None:
    if not condition:
        raise error(message)
