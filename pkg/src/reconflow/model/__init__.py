from . import ast
from .ast import (
    BusDef, ChannelDef, ConfigurationMap, Context, FnDecl, Kernel, ModuleDef,
    Placement, Program, SystemModel,
)
from .cfg import CFG, build_cfg
from .parser import parse_file, parse_model
from .printer import print_model
from .validate import fpga_task, validate

__all__ = [
    "ast", "BusDef", "ChannelDef", "ConfigurationMap", "Context", "FnDecl", "Kernel",
    "ModuleDef", "Placement", "Program", "SystemModel", "CFG", "build_cfg",
    "parse_file", "parse_model", "print_model", "validate", "fpga_task",
]
