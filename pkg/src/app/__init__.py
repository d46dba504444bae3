"""Human/machine mail classifier service and configuration."""
