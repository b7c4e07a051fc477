"""A small bundled model: five system variables in two decomposition
levels, two causes, and one action, with placeholder priors."""

from .model import TroubleshootingModel, parse_model

SAMPLE_MODEL_TEXT = """\
problem S
system S  subsystems S1 S2
system S1 subsystems S3 S4
system S2
system S3
system S4
cause C1 targets S3 S4 prior 0.5
cause C2 targets S2 S4 prior 0.5
action A parents S2 S4
  row S2=1 S4=1 p 0.3
  row S2=1 S4=0 p 0.6
  row S2=0 S4=1 p 0.2
  row S2=0 S4=0 p 0.4
"""


def sample_model() -> TroubleshootingModel:
    return parse_model(SAMPLE_MODEL_TEXT)
