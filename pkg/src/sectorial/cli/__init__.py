from .config import Scenario, dump_config, load_config, scenario_from_dict, scenario_to_dict
from .demos import builtin_demo
from .report import emit_report
from .runner import Report, run_scenario
