class OpCounter:
    """Tally of counted arithmetic steps, passed into encode/update/decode."""

    def __init__(self):
        self.count = 0

    def add(self, n=1):
        self.count += n

    def __repr__(self):
        return f"OpCounter({self.count})"
