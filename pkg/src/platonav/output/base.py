class MetricsChannel:
    """Base class for consumers of per-iteration metrics records"""

    def publish(self, record):
        """
        Receive a new MetricsRecord
        Must be implemented by subclasses
        """
        raise NotImplementedError("Subclasses must implement publish")

    def close(self):
        """Release resources; called once after the last record"""


class MemoryMetricsChannel(MetricsChannel):
    """Keeps every published record in memory"""

    def __init__(self):
        self.records = []

    def publish(self, record):
        self.records.append(record)

    def column(self, name):
        return [getattr(record, name) for record in self.records]
