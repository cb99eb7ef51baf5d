# The AI-based operations: least-squares forecasting and z-score anomaly
# scanning, triggered straight from natural language.

from asktable import Engine, EngineConfig

engine = Engine(EngineConfig(reference_year=2020))

print("-- forecast --")
result = engine.query("Forecast the honey production in Texas for the next 3 years")
forecast = result.answer
history = forecast.history
print(f"history: {len(history.points)} annual points "
      f"({history.points[0][0]}..{history.points[-1][0]})")
for year, predicted, stderr in forecast.predicted:
    print(f"  {year}: {predicted:,.0f} lb  (residual stderr {stderr:,.0f})")

print("\n-- anomaly scan --")
result = engine.query("Are there anomalies in the honey production of Georgia?")
report = result.answer
flagged = {report.series.points[i][0]: report.series.points[i][1] for i in report.flagged}
print(f"threshold: {report.threshold} population z-score")
print(f"flagged years: {flagged or 'none'}")

print("\n-- tune the threshold from the request --")
result = engine.query("Show anomalies in Georgia honey prices with threshold 2")
print(f"threshold bound from text: {result.answer.threshold}")
print(f"flagged indices: {result.answer.flagged}")
