"""Transaction-level modeling and verification toolkit for HW/SW systems
with a dynamically reconfigurable FPGA."""

__version__ = "0.1.0"
