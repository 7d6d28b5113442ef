"""Hata sınıfları ve çıkış kodları."""

EXIT_OK = 0
EXIT_DETECTED = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3


class RevCheckError(Exception):
    """Tüm alan hatalarının tabanı."""

    kind = "error"
    exit_code = EXIT_RUNTIME


class InvalidArgumentError(RevCheckError, ValueError):
    kind = "invalid-argument"


class CapacityExceededError(RevCheckError):
    kind = "capacity-exceeded"


class SamplingFailureError(RevCheckError):
    """Ret örneklemesi deneme bütçesini tüketti."""

    kind = "sampling-failure"

    def __init__(self, message: str, attempts: int, window: tuple[int, int]):
        super().__init__(message)
        self.attempts = attempts
        self.window = window


class RealParseError(RevCheckError):
    """`.real` ayrıştırma hatası; satır numarası 1 tabanlıdır."""

    kind = "parse-error"

    def __init__(self, line_no: int, message: str):
        super().__init__(f"satir {line_no}: {message}")
        self.line_no = line_no
        self.reason = message


class ResultsIOError(RevCheckError):
    kind = "io-error"
