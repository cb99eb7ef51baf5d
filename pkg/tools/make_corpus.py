"""Author the bundled request corpus and bootstrap the viz model.

Forty base requests (half simple, half complex), four phrasing variants
each. Ground truths are computed here with pandas/numpy directly from
hand-written per-record plans, independent of the engine code. Simple
records carry exact expected values; complex records carry kind-only
expectations, since their results come from fitted models. The viz model
file is bootstrapped from the oracle results and the expected labels.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "src" / "asktable" / "data"
sys.path.insert(0, str(ROOT / "src"))

from asktable.values import Value  # noqa: E402
from asktable.viz import VizModel, featurize  # noqa: E402

df = pd.read_csv(DATA / "honey.csv")
CODES = {e["name"]: e["code"] for e in json.loads((DATA / "gazetteer.json").read_text())}


def srs(points, label_kind, unit=None, name=None):
    if label_kind == "location":
        return {"kind": "geo_series", "points": [list(p) for p in points], "unit": unit, "name": name}
    return {
        "kind": "series",
        "points": [list(p) for p in points],
        "label_kind": label_kind,
        "unit": unit,
        "name": name,
    }


def sc(value, unit=None):
    return {"kind": "scalar", "value": float(value), "unit": unit}


def cell(state, year, col):
    row = df[(df.state == state) & (df.year == year)]
    assert len(row) == 1, (state, year)
    return float(row[col].iloc[0])


def geo_points(series: pd.Series):
    return sorted((CODES[s], float(v)) for s, v in series.items())


def year_points(series: pd.Series):
    return sorted((int(y), float(v)) for y, v in series.items())


def ols_forecast(sub: pd.DataFrame, col: str, horizon: int, unit):
    """Closed-form least squares via numpy, independent of the executor."""
    grouped = sub.groupby("year")[col].mean()
    ts = grouped.index.to_numpy(dtype=float)
    ys = grouped.to_numpy(dtype=float)
    slope, intercept = np.polyfit(ts, ys, 1)
    residuals = ys - (intercept + slope * ts)
    stderr = float(np.sqrt((residuals**2).sum() / (len(ts) - 2))) if len(ts) > 2 else 0.0
    last = int(ts.max())
    predicted = [
        [last + i, float(intercept + slope * (last + i)), stderr]
        for i in range(1, horizon + 1)
    ]
    history = srs(year_points(grouped), "temporal", unit=unit, name=col)
    return {"kind": "forecast", "history": history, "predicted": predicted, "unit": unit}


def zscore_report(sub: pd.DataFrame, col: str, threshold: float, unit, label="year"):
    grouped = sub.groupby(label)[col].mean()
    values = grouped.to_numpy(dtype=float)
    mean, std = values.mean(), values.std()  # population std (ddof=0)
    flags = (
        [] if std == 0 else [int(i) for i, v in enumerate(values) if abs(v - mean) / std > threshold]
    )
    return {
        "kind": "anomaly_report",
        "series": srs(year_points(grouped), "temporal", unit=unit, name=col),
        "flagged": flags,
        "threshold": threshold,
    }


USD = "USD/lb"
LB = "lb"

RECORDS = [
    # ---------------------------------------------------------------- simple
    dict(
        id="s01", cls="simple",
        variants=[
            "What was the price of honey in Alabama in 2010?",
            "How much was honey in Alabama in 2010?",
            "What did honey cost in Alabama ten years ago?",
            "Show me the average price of honey in AL in 2010",
        ],
        expected=sc(cell("Alabama", 2010, "priceperlb"), USD), tolerance=0.005,
        viz=["kpi_card", "text_answer"],
        notes="the reference lookup; variant 3 needs reference year 2020",
    ),
    dict(
        id="s02", cls="simple",
        variants=[
            "How much honey was produced in Florida in 2005?",
            "What was the total production in Florida in 2005?",
            "Florida honey production in 2005",
            "Production output for FL in 2005",
        ],
        expected=sc(cell("Florida", 2005, "totalprod"), LB),
        viz=["kpi_card", "text_answer"],
    ),
    dict(
        id="s03", cls="simple",
        variants=[
            "What was the average price of honey in 2008?",
            "Average honey price across all states in 2008",
            "What did honey cost on average in 2008?",
            "Mean price per pound in 2008",
        ],
        expected=sc(df[df.year == 2008].priceperlb.mean(), USD), tolerance=0.005,
        viz=["kpi_card", "text_answer"],
    ),
    dict(
        id="s04", cls="simple",
        variants=[
            "What was the total honey production in 2012?",
            "How much honey was produced overall in 2012?",
            "Total production across all states in 2012",
            "Sum of honey production in 2012",
        ],
        expected=sc(df[df.year == 2012].totalprod.sum(), LB),
        viz=["kpi_card", "text_answer"],
    ),
    dict(
        id="s05", cls="simple",
        variants=[
            "What was the highest price of honey in Georgia?",
            "What was the peak honey price in Georgia?",
            "Maximum price per pound in Georgia",
            "Peak price per pound in Georgia",
        ],
        expected=sc(df[df.state == "Georgia"].priceperlb.max(), USD), tolerance=0.005,
        viz=["kpi_card", "text_answer"],
    ),
    dict(
        id="s06", cls="simple",
        variants=[
            "What was the lowest honey production in Texas?",
            "Minimum production in Texas",
            "What was the smallest harvest in Texas?",
            "At its lowest, how much honey did Texas produce?",
        ],
        expected=sc(df[df.state == "Texas"].totalprod.min(), LB),
        viz=["kpi_card", "text_answer"],
    ),
    dict(
        id="s07", cls="simple",
        variants=[
            "How many states produced honey in 2010?",
            "Number of states with honey production in 2010",
            "Count the states in the 2010 data",
            "How many regions reported honey in 2010?",
        ],
        expected=sc(df[df.year == 2010].state.nunique()),
        viz=["kpi_card", "text_answer"],
    ),
    dict(
        id="s08", cls="simple",
        variants=[
            "Show me the honey production by state in 2010",
            "Production per state in 2010",
            "How much honey did each state produce in 2010?",
            "Honey output for every state in 2010",
        ],
        expected=srs(geo_points(df[df.year == 2010].groupby("state").totalprod.sum()), "location", LB),
        viz=["geo_heatmap", "bar_chart"],
    ),
    dict(
        id="s09", cls="simple",
        variants=[
            "What was the price of honey in California over the years?",
            "Show the price history for California",
            "California honey prices by year",
            "Honey prices in California over time",
        ],
        expected=srs(year_points(df[df.state == "California"].groupby("year").priceperlb.mean()), "temporal", USD),
        viz=["line_chart", "table_view"],
    ),
    dict(
        id="s10", cls="simple",
        variants=[
            "Top 5 states by honey production in 2011",
            "Which 5 states produced the most honey in 2011?",
            "The five biggest honey producing states in 2011",
            "Rank the top five states by honey output in 2011",
        ],
        expected=srs(
            sorted(
                geo_points(df[df.year == 2011].groupby("state").totalprod.sum().nlargest(5)),
                key=lambda p: -p[1],
            ),
            "location", LB,
        ),
        viz=["bar_chart", "geo_heatmap"],
    ),
    dict(
        id="s11", cls="simple",
        variants=[
            "Which state had the highest honey price in 2009?",
            "Where was honey most expensive in 2009?",
            "In which state did honey cost the most in 2009?",
            "State with the top price per pound in 2009",
        ],
        expected=srs(
            geo_points(df[df.year == 2009].groupby("state").priceperlb.mean().nlargest(1)),
            "location", USD,
        ),
        viz=["text_answer", "geo_heatmap", "bar_chart"],
    ),
    dict(
        id="s12", cls="simple",
        variants=[
            "Compare the average price of honey in Alabama and Georgia in 2010",
            "What's the price difference between Alabama and Georgia in 2010?",
            "How much more did honey cost in Alabama than in Georgia in 2010?",
            "Price gap between AL and GA in 2010",
        ],
        expected=sc(cell("Alabama", 2010, "priceperlb") - cell("Georgia", 2010, "priceperlb"), USD),
        tolerance=0.005,
        viz=["kpi_card", "text_answer"],
    ),
    dict(
        id="s13", cls="simple",
        variants=[
            "How did the total production change from 2000 to 2005 in Texas?",
            "How much did Texas honey production change between 2000 and 2005?",
            "By how much did production change in Texas from 2000 to 2005?",
            "Texas production change between 2000 and 2005",
        ],
        expected=sc(cell("Texas", 2005, "totalprod") - cell("Texas", 2000, "totalprod"), LB),
        viz=["kpi_card", "text_answer"],
    ),
    dict(
        id="s14", cls="simple",
        variants=[
            "Show me all data for Alabama in 2010 as a table",
            "Alabama 2010, in a table",
            "Give me the complete row for Alabama in 2010",
            "Display everything about Alabama in 2010",
        ],
        expected={
            "kind": "table",
            "rows": df[(df.state == "Alabama") & (df.year == 2010)].values.tolist(),
        },
        viz=["table_view"],
    ),
    dict(
        id="s15", cls="simple",
        variants=[
            "What was the average yield per colony in North Dakota?",
            "Typical yield per colony in North Dakota",
            "What yield per colony did North Dakota average?",
            "North Dakota's usual yield per colony",
        ],
        expected=sc(df[df.state == "North Dakota"].yieldpercol.mean(), "lb/colony"),
        viz=["kpi_card", "text_answer"],
    ),
    dict(
        id="s16", cls="simple",
        variants=[
            "Production value by year in Florida",
            "Florida's production value over the years",
            "Show the value of production in Florida for each year",
            "Yearly honey revenue in Florida",
        ],
        expected=srs(year_points(df[df.state == "Florida"].groupby("year").prodvalue.sum()), "temporal", "USD"),
        viz=["line_chart", "table_view"],
    ),
    dict(
        id="s17", cls="simple",
        variants=[
            "How many years had a price above 2 dollars in Alabama?",
            "In how many years did Alabama honey cost more than 2 dollars?",
            "Count the years with prices above 2 dollars in Alabama",
            "How many years was the Alabama price over 2 dollars?",
        ],
        expected=sc(int((df[df.state == "Alabama"].priceperlb > 2).sum())),
        viz=["kpi_card", "text_answer"],
    ),
    dict(
        id="s18", cls="simple",
        variants=[
            "How much honey was in stock in Wisconsin in 1999?",
            "Wisconsin honey stocks in 1999",
            "What were the honey reserves in Wisconsin in 1999?",
            "Stockpile levels for WI in 1999",
        ],
        expected=sc(cell("Wisconsin", 1999, "stocks"), LB),
        viz=["kpi_card", "text_answer"],
    ),
    dict(
        id="s19", cls="simple",
        variants=[
            "What was the average honey production per state?",
            "Average production in each state",
            "Mean honey output per state",
            "Mean production for each state",
        ],
        expected=srs(geo_points(df.groupby("state").totalprod.mean()), "location", LB),
        viz=["geo_heatmap", "bar_chart"],
    ),
    dict(
        id="s20", cls="simple",
        variants=[
            "How many bee colonies were in California in 2003?",
            "Number of colonies in California in 2003",
            "How many hives did California have in 2003?",
            "Colony count for California in 2003",
        ],
        expected=sc(cell("California", 2003, "numcol"), "colonies"),
        viz=["kpi_card", "text_answer"],
    ),
    # --------------------------------------------------------------- complex
    dict(
        id="c01", cls="complex",
        variants=[
            "How will the average honey price develop in Florida next year?",
            "Predict the price of honey in Florida for next year",
            "What will honey cost in Florida next year?",
            "Price outlook for Florida",
        ],
        expected={"kind": "forecast"},
        oracle_value=ols_forecast(df[df.state == "Florida"], "priceperlb", 1, USD),
        viz=["line_chart", "kpi_card"],
        notes="the regression example request",
    ),
    dict(
        id="c02", cls="complex",
        variants=[
            "Forecast the honey production in Texas for the next 3 years",
            "How much honey will Texas produce in three years?",
            "Estimate the production in Texas for the next 3 years",
            "Texas honey production prognosis for the coming 3 years",
        ],
        expected={"kind": "forecast"},
        oracle_value=ols_forecast(df[df.state == "Texas"], "totalprod", 3, LB),
        viz=["line_chart", "table_view"],
    ),
    dict(
        id="c03", cls="complex",
        variants=[
            "Are there anomalies in the honey production of Georgia?",
            "Find outliers in Georgia's honey production",
            "Any unusual production values in Georgia?",
            "Detect irregular harvest amounts in Georgia",
        ],
        expected={"kind": "anomaly_report"},
        oracle_value=zscore_report(df[df.state == "Georgia"], "totalprod", 2.5, LB),
        viz=["scatter_plot", "line_chart"],
        notes="Georgia 2006 carries an injected production spike",
    ),
    dict(
        id="c04", cls="complex",
        variants=[
            "Show anomalies in Georgia honey prices with threshold 2",
            "Flag price outliers in Georgia at threshold 2",
            "Georgia price anomalies with threshold 2",
            "Unusual Georgia price points, threshold 2",
        ],
        expected={"kind": "anomaly_report"},
        oracle_value=zscore_report(df[df.state == "Georgia"], "priceperlb", 2.0, USD),
        viz=["table_view", "scatter_plot"],
    ),
    dict(
        id="c05", cls="complex",
        variants=[
            "How will the average honey price develop next year?",
            "Predict the average price for next year",
            "What will honey cost on average next year?",
            "Average price outlook for the coming year",
        ],
        expected={"kind": "forecast"},
        oracle_value=ols_forecast(df, "priceperlb", 1, USD),
        viz=["line_chart", "kpi_card"],
    ),
    dict(
        id="c06", cls="complex",
        variants=[
            "How will California's honey production develop next year?",
            "Forecast the production in California for next year",
            "Predict how much honey California will produce next year",
            "California production outlook for next year",
        ],
        expected={"kind": "forecast"},
        oracle_value=ols_forecast(df[df.state == "California"], "totalprod", 1, LB),
        viz=["line_chart", "table_view"],
    ),
    dict(
        id="c07", cls="complex",
        variants=[
            "Are there outliers in North Dakota's yield per colony?",
            "Any anomalies in the yield per colony in North Dakota?",
            "Find unusual yield values in North Dakota",
            "Abnormal yield per colony figures in North Dakota?",
        ],
        expected={"kind": "anomaly_report"},
        oracle_value=zscore_report(df[df.state == "North Dakota"], "yieldpercol", 2.5, "lb/colony"),
        viz=["scatter_plot", "line_chart"],
    ),
    dict(
        id="c08", cls="complex",
        variants=[
            "Forecast the honey stocks in Minnesota for the next 2 years",
            "How will Minnesota's honey inventory develop over the next 2 years?",
            "Predict Minnesota stocks for the coming 2 years",
            "Minnesota stockpile outlook for the next 2 years",
        ],
        expected={"kind": "forecast"},
        oracle_value=ols_forecast(df[df.state == "Minnesota"], "stocks", 2, LB),
        viz=["line_chart", "table_view"],
    ),
    dict(
        id="c09", cls="complex",
        variants=[
            "Are there anomalies in Utah's honey production?",
            "Detect production outliers in Utah",
            "Any abnormal harvest figures in Utah?",
            "Find unusual production amounts in Utah",
        ],
        expected={"kind": "anomaly_report"},
        oracle_value=zscore_report(df[df.state == "Utah"], "totalprod", 2.5, LB),
        viz=["scatter_plot", "line_chart"],
        notes="Utah 2009 carries an injected production dip",
    ),
    dict(
        id="c10", cls="complex",
        variants=[
            "Are there anomalies in the Illinois honey prices?",
            "Find price outliers in Illinois",
            "Any unusual price points in Illinois?",
            "Spot irregular prices in Illinois",
        ],
        expected={"kind": "anomaly_report"},
        oracle_value=zscore_report(df[df.state == "Illinois"], "priceperlb", 2.5, USD),
        viz=["scatter_plot", "line_chart"],
        notes="Illinois 2011 carries an injected price spike",
    ),
    dict(
        id="c11", cls="complex",
        variants=[
            "How will the price of honey in Alabama develop next year?",
            "Forecast Alabama honey prices for next year",
            "Predict what honey will cost in Alabama next year",
            "Alabama price outlook for next year",
        ],
        expected={"kind": "forecast"},
        oracle_value=ols_forecast(df[df.state == "Alabama"], "priceperlb", 1, USD),
        viz=["line_chart", "kpi_card"],
    ),
    dict(
        id="c12", cls="complex",
        variants=[
            "How will the total honey production develop over the next 2 years?",
            "Forecast the total production for the next 2 years",
            "Predict overall honey production for the coming 2 years",
            "Total production outlook for the next 2 years",
        ],
        expected={"kind": "forecast"},
        oracle_value=ols_forecast(df, "totalprod", 2, LB),
        viz=["line_chart", "table_view"],
    ),
    dict(
        id="c13", cls="complex",
        variants=[
            "Any anomalies in the average honey price across states?",
            "Are there outliers in the yearly average price?",
            "Find anomalies in the average price of honey",
            "Unusual values in the average honey price?",
        ],
        expected={"kind": "anomaly_report"},
        oracle_value=zscore_report(df, "priceperlb", 2.5, USD),
        viz=["scatter_plot", "line_chart"],
    ),
    dict(
        id="c14", cls="complex",
        variants=[
            "How will Georgia's production value develop next year?",
            "Forecast the value of production in Georgia for next year",
            "Predict Georgia's honey revenue for next year",
            "Georgia production value outlook for next year",
        ],
        expected={"kind": "forecast"},
        oracle_value=ols_forecast(df[df.state == "Georgia"], "prodvalue", 1, "USD"),
        viz=["line_chart", "kpi_card"],
    ),
    dict(
        id="c15", cls="complex",
        variants=[
            "Are there anomalies in Wisconsin's honey stocks?",
            "Find outliers in the Wisconsin stockpiles",
            "Any unusual stock levels in Wisconsin?",
            "Detect abnormal inventories in Wisconsin",
        ],
        expected={"kind": "anomaly_report"},
        oracle_value=zscore_report(df[df.state == "Wisconsin"], "stocks", 2.5, LB),
        viz=["scatter_plot", "line_chart"],
    ),
    dict(
        id="c16", cls="complex",
        variants=[
            "How will the yield per colony in Iowa develop next year?",
            "Forecast Iowa's yield per colony for next year",
            "Predict the productivity of Iowa colonies next year",
            "Iowa yield outlook for next year",
        ],
        expected={"kind": "forecast"},
        oracle_value=ols_forecast(df[df.state == "Iowa"], "yieldpercol", 1, "lb/colony"),
        viz=["line_chart", "kpi_card"],
    ),
    dict(
        id="c17", cls="complex",
        variants=[
            "Find anomalies in Michigan's production with threshold 2",
            "Michigan production outliers at threshold 2",
            "Any abnormal Michigan harvests? Use threshold 2",
            "Unusual production in Michigan, threshold 2",
        ],
        expected={"kind": "anomaly_report"},
        oracle_value=zscore_report(df[df.state == "Michigan"], "totalprod", 2.0, LB),
        viz=["scatter_plot", "table_view"],
    ),
    dict(
        id="c18", cls="complex",
        variants=[
            "Forecast Oregon honey prices for the next 5 years",
            "How will the price in Oregon develop over the next 5 years?",
            "Predict Oregon prices for the coming 5 years",
            "Oregon price outlook for the next 5 years",
        ],
        expected={"kind": "forecast"},
        oracle_value=ols_forecast(df[df.state == "Oregon"], "priceperlb", 5, USD),
        viz=["line_chart", "table_view"],
    ),
    dict(
        id="c19", cls="complex",
        variants=[
            "Are there anomalies in Montana's honey production?",
            "Find outliers in the Montana harvest",
            "Any unusual production figures in Montana?",
            "Detect irregular output in Montana",
        ],
        expected={"kind": "anomaly_report"},
        oracle_value=zscore_report(df[df.state == "Montana"], "totalprod", 2.5, LB),
        viz=["scatter_plot", "line_chart"],
    ),
    dict(
        id="c20", cls="complex",
        variants=[
            "How will the number of colonies in New York develop next year?",
            "Forecast the colony count in New York for next year",
            "Predict how many hives New York will have next year",
            "New York colony outlook for next year",
        ],
        expected={"kind": "forecast"},
        oracle_value=ols_forecast(df[df.state == "New York"], "numcol", 1, "colonies"),
        viz=["line_chart", "kpi_card"],
    ),
]


def main() -> None:
    assert len(RECORDS) == 40
    assert sum(1 for r in RECORDS if r["cls"] == "simple") == 20

    corpus_path = DATA / "corpus.jsonl"
    with corpus_path.open("w") as fh:
        for r in RECORDS:
            assert len(r["variants"]) == 4, r["id"]
            record = {
                "id": r["id"],
                "class": r["cls"],
                "variants": r["variants"],
                "expected_result": dict(r["expected"]),
                "expected_viz": r["viz"],
            }
            if "tolerance" in r:
                record["expected_result"]["tolerance"] = r["tolerance"]
            if r.get("notes"):
                record["notes"] = r["notes"]
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    print(f"wrote {len(RECORDS)} records to {corpus_path}")

    examples = []
    for r in RECORDS:
        payload = r.get("oracle_value", r["expected"])
        value = Value.from_dict(payload)
        features = featurize(value)
        examples.append((features, r["viz"][0]))
    model = VizModel(examples)
    model.save(DATA / "viz_model.json")
    print(f"wrote viz model with {len(examples)} examples")

    labels = [r["viz"][0] for r in RECORDS]
    from collections import Counter

    print("label distribution:", dict(Counter(labels)))


if __name__ == "__main__":
    main()
