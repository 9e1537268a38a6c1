from .measure import (
    BIT, BRANCH, CONDITION, METRICS, STATEMENT, Campaign, CoverageReport, coverage_universe,
    fault_sites, generate_tests, measure_coverage,
)
from .pcc import PropertyCoverageReport, pcc
from .properties import (
    DEADLINE, EXPECT, FAIL, INVARIANT, PASS, Property, PropertyResult, PropertySyntaxError,
    check_properties, format_properties, golden_expectations, load_properties, parse_properties,
)
