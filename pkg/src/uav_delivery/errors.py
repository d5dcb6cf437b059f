"""Exception hierarchy shared by the library and the CLI."""


class DeliveryError(Exception):
    """Base class for all package errors."""


class InstanceFileNotFound(DeliveryError, FileNotFoundError):
    """Instance document does not exist."""


class SchemaError(DeliveryError, ValueError):
    """Instance document is malformed or missing required keys."""


class SchemaVersionError(SchemaError):
    """Instance document was written with an unsupported schema version."""


class CapacityViolationError(DeliveryError, ValueError):
    """A package is heavier than the UAV capacity."""


class InfeasibleInstanceError(DeliveryError):
    """A customer cannot be served even by a dedicated round trip."""

    def __init__(self, customer_id, energy_joule, battery_joule):
        self.customer_id = customer_id
        self.energy_joule = energy_joule
        self.battery_joule = battery_joule
        super().__init__(
            f"customer {customer_id} is unreachable: round trip needs "
            f"{energy_joule:.1f} J but the battery holds {battery_joule:.1f} J"
        )


class MalformedRouteError(DeliveryError, ValueError):
    """Node sequence does not start/end at the depot or revisits it mid-flight."""


class PartialCoverageError(DeliveryError):
    """A mission ended with customers still unserved.

    The partial :class:`~uav_delivery.mission.MissionResult` is attached as
    ``result``.
    """

    def __init__(self, message, result):
        super().__init__(message)
        self.result = result
