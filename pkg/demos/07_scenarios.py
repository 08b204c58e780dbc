"""Running a scenario file programmatically; the CLI does the same with `agcal run`."""

from agcal.scenario import emit, parse_scenario, run_scenario

TEXT = """\
scenario: demo
gauge Bs: powers(1/eps)
command: compare
  x: exp(2/eps)
  y: exp(1/eps)*eps^-5
  expect: YbigOofX
command: gauge-check
  gauge: expof($Bs)
gauge EBs: expof($Bs)
command: ode
  A: [[1/eps]]
  c: [1]
  B: $Bs
  moderate_in: $Bs; $EBs
  expect.moderate.Bs: Fails
  expect.moderate.EBs: Holds
"""

rep = run_scenario(parse_scenario(TEXT, "demo.agc"))
print(emit(rep, "table"))
print("all expectations met:", rep.ok)
