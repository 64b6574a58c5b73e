"""Custom exceptions for the ainfdiag package."""

from typing import Any, Dict, Optional, Union


class AInfDiagError(Exception):
    """Base exception class for all ainfdiag errors."""

    def __init__(self, message: str, code: Union[str, None] = None):
        """Initialize AInfDiagError.

        Args:
            message: Error message
            code: Optional error code for categorization
        """
        super().__init__(message)
        self.message = message
        self.code = code


class ConfigurationError(AInfDiagError):
    """Raised when there's an error in configuration."""

    def __init__(self, message: str, config_key: Union[str, None] = None):
        """Initialize ConfigurationError.

        Args:
            message: Error message
            config_key: The configuration key that caused the error
        """
        super().__init__(message, "CONFIG_ERROR")
        self.config_key = config_key


class ContractViolation(AInfDiagError):
    """Raised when an operation is called outside its precondition."""

    def __init__(self, message: str, argument: Union[str, None] = None):
        """Initialize ContractViolation.

        Args:
            message: Error message
            argument: Name of the offending argument
        """
        super().__init__(message, "CONTRACT_VIOLATION")
        self.argument = argument


class ResourceLimitError(AInfDiagError):
    """Raised when a configured enumeration or arity cap is exceeded."""

    def __init__(self, message: str, limit: Optional[int] = None):
        """Initialize ResourceLimitError.

        Args:
            message: Error message
            limit: The cap that was exceeded
        """
        super().__init__(message, "RESOURCE_LIMIT")
        self.limit = limit


class VerificationError(AInfDiagError):
    """Raised when a mathematical self-check fails."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        """Initialize VerificationError.

        Args:
            message: Error message
            details: Structured payload describing the discrepancy
        """
        super().__init__(message, "VERIFICATION_FAILED")
        self.details = details or {}


class MonomialParseError(AInfDiagError):
    """Raised when a monomial argument string cannot be parsed."""

    def __init__(self, message: str, token: Union[str, None] = None):
        """Initialize MonomialParseError.

        Args:
            message: Error message
            token: The offending token
        """
        super().__init__(message, "PARSE_ERROR")
        self.token = token
