import glob
import os

import pytest

from reconflow.model import parse_file, parse_model

HERE = os.path.dirname(__file__)
CORPUS = sorted(glob.glob(os.path.join(HERE, "corpus", "*.rsm")))


def corpus_models():
    return [(os.path.basename(p)[:-4], parse_file(p)) for p in CORPUS]


def model_level(model) -> int:
    if model.config_map is not None and model.config_map.contexts:
        return 3
    return 2 if model.placements else 1


PRODUCER_CONSUMER = """
system pc
module P { port out o behavior { write o <- 1 write o <- 2 write o <- 3 } }
module C { port in i port out y behavior { repeat 3 { read i -> x write y <- x } } }
channel ch P.o -> C.i
"""

CROSS_BLOCKING = """
system cross
module A { port in i port out o behavior { read i -> x write o <- x } }
module B { port in i port out o behavior { read i -> x write o <- x } }
channel ab A.o -> B.i capacity 1
channel ba B.o -> A.i capacity 1
"""

SW_TO_HW = """
system swhw
bus main_bus cycles_per_word 1
module P { port out o behavior { compute work 5 write o <- 7 } }
module C { port in i port out res behavior { read i -> x compute crunch 3 write res <- x } }
channel ch P.o -> C.i
place P sw
place C hw
"""

LEVEL3 = """
system l3
bus main_bus
context config1 bitstream 100 { fn DISTANCE latency 50 }
context config2 bitstream 80 { fn ROOT latency 20 }
module SWT {
  port out o
  behavior {
    reconfigure config1
    callfpga DISTANCE() -> d
    reconfigure config2
    callfpga ROOT() -> r
    write o <- d + r
  }
}
module DISTANCE { kernel () -> d { d = 3 } }
module ROOT { kernel () -> r { r = 4 } }
place SWT sw
place DISTANCE fpga
place ROOT fpga
"""


@pytest.fixture
def parse():
    return parse_model


# acceptance verdict lines, echoed again at the end of the session
ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
