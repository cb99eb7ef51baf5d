"""Compile an annotated phrase into ranked typed operation graphs.

Compilation follows three steps: score content tokens against function
descriptions, lower data anchors into leaf chains (scan, filters,
projections, group keys, literals), then expand candidate sinks
recursively, where every unfilled input slot may only be filled by
producers whose output kind matches the slot. Surviving graphs are
deduplicated, validated, and ranked by the selection policy (complete
first, then relevance = mean node score x token coverage).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product

from .annotate import PhraseStructure
from .dataset import Dataset
from .embeddings import EmbeddingStore
from .errors import BuilderError, UnintelligibleRequestError
from .registry import DEFAULT_TAU_FN, FunctionSpec, Registry, match_term
from .values import ValueKind

LABEL_PREFERENCE = ("temporal", "location", "categorical")

# comparator phrase -> filter operator; scanned over raw lemmas so that
# stopwords inside phrases ("at least") still participate
_COMPARATORS = [
    (("more", "than"), ">"),
    (("greater", "than"), ">"),
    (("larger", "than"), ">"),
    (("higher", "than"), ">"),
    (("less", "than"), "<"),
    (("lower", "than"), "<"),
    (("smaller", "than"), "<"),
    (("fewer", "than"), "<"),
    (("at", "least"), ">="),
    (("at", "most"), "<="),
    (("up", "to"), "<="),
    (("above",), ">"),
    (("over",), ">"),
    (("exceeding",), ">"),
    (("beyond",), ">"),
    (("below",), "<"),
    (("under",), "<"),
    (("after",), ">"),
    (("since",), ">="),
    (("before",), "<"),
    (("until",), "<="),
]


@dataclass
class BuilderConfig:
    beam_width: int = 8
    max_depth: int = 6
    tau_fn: float = DEFAULT_TAU_FN
    max_candidates: int = 64
    anomaly_threshold: float = 2.5


@dataclass(frozen=True)
class SpanMatch:
    """One content token matched against one function description."""

    fn_id: str
    score: float
    params: tuple
    token_index: int
    term: str = ""  # the keyword/embedding term that anchored the match


@dataclass(frozen=True)
class FilterPlan:
    column: str
    op: str
    literal: object
    tokens: frozenset
    order: int


@dataclass
class AnchorContext:
    """Phrase anchors lowered to structural building blocks."""

    filters: list[FilterPlan] = field(default_factory=list)
    projections: list[tuple[str, frozenset]] = field(default_factory=list)
    group_keys: list[tuple[str, frozenset, bool, bool]] = field(default_factory=list)
    table_tokens: frozenset = frozenset()
    future: tuple[int, frozenset] | None = None
    numerics: list[tuple[float, int, frozenset]] = field(default_factory=list)

    def without_filters(self, drop: list[FilterPlan]) -> "AnchorContext":
        ctx = AnchorContext(
            filters=[f for f in self.filters if f not in drop],
            projections=self.projections,
            group_keys=self.group_keys,
            table_tokens=self.table_tokens,
            future=self.future,
            numerics=self.numerics,
        )
        return ctx

    def with_filter(self, extra: FilterPlan) -> "AnchorContext":
        ctx = self.without_filters([])
        ctx.filters = sorted(ctx.filters + [extra], key=lambda f: f.order)
        return ctx


@dataclass(frozen=True)
class PlanNode:
    """Immutable bottom-up plan tree node; shared subtrees merge at finalize."""

    function: str
    params: tuple
    inputs: tuple
    score: float
    consumed: frozenset
    output: ValueKind
    tags: frozenset = frozenset()

    @property
    def signature(self) -> tuple:
        return (self.function, self.params, tuple(i.signature for i in self.inputs))

    def all_consumed(self) -> frozenset:
        out = set(self.consumed)
        for child in self.inputs:
            out.update(child.all_consumed())
        return frozenset(out)


@dataclass
class OperationNode:
    id: str
    function: str
    bound_params: dict
    input_edges: list[str]
    match_score: float
    consumed_spans: list[tuple[int, int]]
    output_kind: ValueKind


@dataclass
class OperationGraph:
    nodes: list[OperationNode]  # topological order
    edges: list[tuple[str, str, int]]  # (from, to, slot)
    sink: str
    depth: int
    relevance: float
    complete: bool
    coverage: float = 0.0

    def node(self, node_id: str) -> OperationNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    @property
    def signature(self) -> str:
        return json.dumps(to_wire(self), sort_keys=True)


def _params_dict(params: tuple) -> dict:
    return dict(params)


def _dedup_best(nodes: list[PlanNode]) -> list[PlanNode]:
    """Drop structural duplicates, keeping the one consuming most tokens
    (equal plans can arise from both rule lowering and span matching)."""
    best: dict = {}
    order: list = []
    for n in nodes:
        sig = n.signature
        if sig not in best:
            best[sig] = n
            order.append(sig)
        elif len(n.all_consumed()) > len(best[sig].all_consumed()):
            best[sig] = n
    return [best[sig] for sig in order]


def _pt(**kw) -> tuple:
    return tuple(sorted(kw.items()))


class GraphBuilder:
    def __init__(
        self,
        registry: Registry,
        dataset: Dataset,
        embeddings: EmbeddingStore | None = None,
        config: BuilderConfig | None = None,
    ):
        self.registry = registry
        self.dataset = dataset
        self.embeddings = embeddings
        self.config = config or BuilderConfig()

    # ------------------------------------------------------------------
    # step (i): span-to-function matching
    # ------------------------------------------------------------------

    def _match_spans(self, phrase: PhraseStructure, blocked: set) -> list[SpanMatch]:
        matches = []
        for span in phrase.content_spans:
            for idx, lemma in zip(span.token_indices, span.lemmas):
                if idx in blocked:
                    continue
                for spec in self.registry.functions:
                    m = match_term(lemma, spec, self.embeddings, self.config.tau_fn)
                    if m is not None and m.score >= self.config.tau_fn:
                        matches.append(
                            SpanMatch(spec.id, min(1.0, m.score), m.params, idx, m.anchor_term)
                        )
        matches.sort(key=lambda m: (-m.score, m.token_index, m.fn_id))
        return matches

    # ------------------------------------------------------------------
    # step (ii): anchor lowering
    # ------------------------------------------------------------------

    def _compare_words(self) -> set:
        spec = self.registry.get("compare") if "compare" in self.registry else None
        if spec is None:
            return set()
        return set(spec.keywords) | set(spec.synonyms)

    def _scan_comparators(
        self, phrase: PhraseStructure
    ) -> tuple[list[FilterPlan], set, set]:
        """Comparator phrases + literal anchors -> range filters."""
        tokens = phrase.tokens
        # with comparison intent in the phrase, "between X and Y" / "from X
        # to Y" name the two operands, not a range filter
        compare_intent = bool(
            {t.lemma for t in tokens} & self._compare_words()
        )
        anchors_by_first = {a.first: a for a in phrase.anchors}
        used_tokens: set = set()
        used_anchor_firsts: set = set()
        filters: list[FilterPlan] = []

        def literal_anchor_at(j):
            a = anchors_by_first.get(j)
            if a is None or a.first in used_anchor_firsts:
                return None
            if a.kind == "temporal" and not a.relative_future:
                return a
            if a.kind == "numeric":
                return a
            return None

        def nearest_numeric_column(i):
            best = None
            for a in phrase.anchors:
                if a.kind != "column":
                    continue
                col = self.dataset.column(a.column)
                if col.semantic_type != "numerical":
                    continue
                dist = abs(a.first - i) + (0 if a.first < i else 0.5)
                if best is None or dist < best[0]:
                    best = (dist, a)
            return best[1] if best else None

        order = 1000  # comparator filters sort after equality filters
        i = 0
        while i < len(tokens):
            hit = None
            for phrase_lemmas, op in _COMPARATORS:
                n = len(phrase_lemmas)
                if tuple(t.lemma for t in tokens[i : i + n]) == phrase_lemmas:
                    hit = (phrase_lemmas, op, n)
                    break
            if hit is None:
                # "between X and Y" / "from X to Y" ranges
                if not compare_intent and tokens[i].lemma in ("between", "from"):
                    closer = "and" if tokens[i].lemma == "between" else "to"
                    a1 = literal_anchor_at(i + 1)
                    if (
                        a1 is not None
                        and a1.last + 1 < len(tokens)
                        and tokens[a1.last + 1].lemma == closer
                    ):
                        a2 = literal_anchor_at(a1.last + 2)
                        if a2 is not None and a1.kind == a2.kind:
                            column, lo, hi = self._range_column(a1, a2)
                            if column is not None:
                                toks = frozenset(
                                    {i, a1.last + 1}
                                    | set(a1.token_range)
                                    | set(a2.token_range)
                                )
                                filters.append(
                                    FilterPlan(column, "between", (lo, hi), toks, order)
                                )
                                order += 1
                                used_tokens.update(toks)
                                used_anchor_firsts.update({a1.first, a2.first})
                                i = a2.last + 1
                                continue
                i += 1
                continue
            phrase_lemmas, op, n = hit
            lit = literal_anchor_at(i + n)
            if lit is None:
                i += 1
                continue
            if lit.kind == "temporal":
                column, literal = lit.column, lit.year
            else:
                col_anchor = nearest_numeric_column(i)
                if col_anchor is None:
                    i += 1
                    continue
                column, literal = col_anchor.column, lit.number
            if column is None:
                i += 1
                continue
            toks = frozenset(set(range(i, i + n)) | set(lit.token_range))
            filters.append(FilterPlan(column, op, literal, toks, order))
            order += 1
            used_tokens.update(toks)
            used_anchor_firsts.add(lit.first)
            i = lit.last + 1

        return filters, used_tokens, used_anchor_firsts

    def _range_column(self, a1, a2):
        if a1.kind == "temporal":
            lo, hi = sorted((a1.year, a2.year))
            return a1.column, lo, hi
        return None, None, None

    def _lower_anchors(self, phrase: PhraseStructure) -> tuple[AnchorContext, set]:
        ctx = AnchorContext()
        comparator_filters, blocked, used = self._scan_comparators(phrase)

        eq_by_column: dict[str, list] = {}
        order = 0
        table_tokens = set()
        future_best: tuple[int, frozenset] | None = None
        for a in phrase.anchors:
            if a.first in used:
                continue
            toks = frozenset(a.token_range)
            if a.kind == "table":
                table_tokens.update(toks)
            elif a.kind == "value":
                eq_by_column.setdefault(a.column, []).append((a.value, toks, order))
                order += 1
            elif a.kind == "temporal":
                if a.relative_future:
                    # future literal -> forecast horizon hint, never a filter
                    offset = max(1, a.future_offset)
                    if future_best is None or offset > future_best[0]:
                        merged = toks if future_best is None else future_best[1] | toks
                        future_best = (offset, merged)
                    else:
                        future_best = (future_best[0], future_best[1] | toks)
                elif a.column is not None:
                    eq_by_column.setdefault(a.column, []).append((a.year, toks, order))
                    order += 1
            elif a.kind == "column":
                col = self.dataset.column(a.column)
                if col.semantic_type == "numerical":
                    ctx.projections.append((a.column, toks))
                elif self._collapse_marked(phrase, a):
                    # "across all states" collapses over the column rather
                    # than grouping by it
                    table_tokens.update(toks)
                else:
                    marked, question, mark_tok = self._group_marked(phrase, a)
                    key_toks = toks if mark_tok is None else toks | {mark_tok}
                    ctx.group_keys.append((a.column, key_toks, marked, question))
            elif a.kind == "numeric":
                ctx.numerics.append((a.number, a.first, toks))

        for column, entries in eq_by_column.items():
            if len(entries) == 1:
                value, toks, ord_ = entries[0]
                ctx.filters.append(FilterPlan(column, "=", value, toks, ord_))
            else:
                # several values for one column: in-filter unless a compare
                # split claims the pair later
                all_toks = frozenset().union(*(e[1] for e in entries))
                ctx.filters.append(
                    FilterPlan(column, "in", tuple(e[0] for e in entries), all_toks, entries[0][2])
                )
        ctx.filters = sorted(ctx.filters + comparator_filters, key=lambda f: f.order)
        ctx.table_tokens = frozenset(table_tokens)
        ctx.future = future_best
        return ctx, blocked

    _COLLAPSE_MARKERS = ("across", "over", "throughout", "among", "amongst")
    _GROUP_MARKERS = ("per", "by", "each", "every", "which", "what")

    def _group_marked(self, phrase: PhraseStructure, anchor):
        """Explicit grouping phrasing ("per state", "which state", "5 states",
        or a question-word alias) makes the grouped reading certain; a bare
        column mention stays a slightly weaker interpretation. Returns
        (marked, question, marker_token_index): question-marked keys demand a
        label-preserving answer, so scalar collapses over them are blocked.
        """
        tokens = phrase.tokens
        if tokens[anchor.first].lemma in ("where", "when"):
            return True, True, None
        for j in (anchor.first - 1, anchor.first - 2):
            if 0 <= j < len(tokens):
                if tokens[j].lemma in ("which", "what"):
                    return True, True, j
                if tokens[j].lemma in self._GROUP_MARKERS:
                    return True, False, None
                if tokens[j].tag == "number" or tokens[j].lemma in (
                    "one", "two", "three", "four", "five", "six", "seven",
                    "eight", "nine", "ten",
                ):
                    return True, False, None
        return False, False, None

    def _collapse_marked(self, phrase: PhraseStructure, anchor) -> bool:
        # "over the years" idiomatically asks for the time series, so the
        # collapse reading only applies to non-temporal columns
        if self.dataset.column(anchor.column).semantic_type == "temporal":
            return False
        for j in (anchor.first - 1, anchor.first - 2):
            if 0 <= j < len(phrase.tokens) and phrase.tokens[j].lemma in self._COLLAPSE_MARKERS:
                return True
        return False

    # ------------------------------------------------------------------
    # data-route chains
    # ------------------------------------------------------------------

    def _pinned(self, ctx: AnchorContext) -> set:
        return {f.column for f in ctx.filters if f.op == "="}

    def _unpinned_label_columns(self, ctx: AnchorContext) -> list[str]:
        pinned = self._pinned(ctx)
        out = []
        for kind in LABEL_PREFERENCE:
            for col in self.dataset.columns_of_type(kind):
                if col.name not in pinned:
                    out.append(col.name)
        return out

    def _default_value_column(self) -> str | None:
        numerical = self.dataset.columns_of_type("numerical")
        return numerical[0].name if numerical else None

    def _default_agg(self, column: str) -> str:
        col = self.dataset.column(column)
        return col.default_agg or "mean"

    def _label_kind(self, column: str | None) -> str:
        if column is None:
            return "numerical"
        return self.dataset.column(column).semantic_type

    def _base_chain(self, ctx: AnchorContext) -> PlanNode:
        node = PlanNode(
            "scan", (), (), 1.0, ctx.table_tokens, ValueKind("table")
        )
        for f in ctx.filters:
            node = PlanNode(
                "filter",
                _pt(column=f.column, op=f.op, literal=f.literal),
                (node,),
                1.0,
                f.tokens,
                ValueKind("table"),
            )
        return node

    def _project_chain(
        self, ctx: AnchorContext, column: str, tokens: frozenset, label: str | None
    ) -> PlanNode:
        return PlanNode(
            "project",
            _pt(column=column, label_column=label),
            (self._base_chain(ctx),),
            1.0,
            tokens,
            ValueKind("series", self._label_kind(label)),
        )

    def _group_chain(
        self,
        ctx: AnchorContext,
        key: str,
        value: str,
        fn: str,
        tokens: frozenset,
        score: float = 1.0,
        tags: frozenset = frozenset(),
    ) -> PlanNode:
        return PlanNode(
            "group_aggregate",
            _pt(key_column=key, value_column=value, fn=fn),
            (self._base_chain(ctx),),
            score,
            tokens,
            ValueKind("series", self._label_kind(key)),
            tags,
        )

    def _series_routes(
        self,
        ctx: AnchorContext,
        want: ValueKind,
        available: tuple,
        depth: int,
        matches: list[SpanMatch],
    ) -> list[PlanNode]:
        routes: list[PlanNode] = []
        projections = ctx.projections or (
            [(self._default_value_column(), frozenset())]
            if self._default_value_column()
            else []
        )
        unpinned = self._unpinned_label_columns(ctx)
        for column, tokens in projections:
            if len(unpinned) <= 1:
                label = unpinned[0] if unpinned else None
                node = self._project_chain(ctx, column, tokens, label)
                if want.accepts(node.output):
                    routes.append(node)
            else:
                key = self._preferred_key(unpinned, want)
                if key is not None:
                    node = self._group_chain(
                        ctx, key, column, self._default_agg(column), tokens
                    )
                    if want.accepts(node.output):
                        routes.append(node)
            for gkey, gtoks, marked, question in ctx.group_keys:
                node = self._group_chain(
                    ctx, gkey, column, self._default_agg(column), tokens | gtoks,
                    score=1.0 if marked else 0.95,
                    tags=frozenset({"question"}) if question else frozenset(),
                )
                if want.accepts(node.output):
                    routes.append(node)
        for node in self._expand_matches(ctx, want, available, depth, matches):
            routes.append(node)
        return routes

    def _preferred_key(self, unpinned: list[str], want: ValueKind) -> str | None:
        if want.element_hint is not None:
            for col in unpinned:
                if self._label_kind(col) == want.element_hint:
                    return col
            return None
        return unpinned[0] if unpinned else None

    def _scalar_routes(
        self, ctx: AnchorContext, available: tuple, depth: int, matches: list[SpanMatch]
    ) -> list[PlanNode]:
        routes = list(self._expand_matches(ctx, ValueKind("scalar"), available, depth, matches))
        # lookup-style data route: aggregate(mean) over a fully pinned chain
        projections = ctx.projections or (
            [(self._default_value_column(), frozenset())]
            if self._default_value_column()
            else []
        )
        if not self._unpinned_label_columns(ctx):
            for column, tokens in projections:
                inner = self._project_chain(ctx, column, tokens, None)
                routes.append(
                    PlanNode("aggregate", _pt(fn="mean"), (inner,), 1.0, frozenset(), ValueKind("scalar"))
                )
        return routes

    # ------------------------------------------------------------------
    # step (iii): recursive sink-first expansion
    # ------------------------------------------------------------------

    def _routes_for(
        self,
        ctx: AnchorContext,
        want: ValueKind,
        available: tuple,
        depth: int,
        matches: list[SpanMatch],
    ) -> list[PlanNode]:
        if depth > self.config.max_depth:
            return []
        if want.kind == "table":
            routes = [self._base_chain(ctx)]
            routes.extend(self._expand_matches(ctx, want, available, depth, matches))
        elif want.kind == "series":
            routes = self._series_routes(ctx, want, available, depth, matches)
        elif want.kind == "scalar":
            routes = self._scalar_routes(ctx, available, depth, matches)
        else:
            routes = list(self._expand_matches(ctx, want, available, depth, matches))
        return self._beam(routes)

    def _beam(self, routes: list[PlanNode]) -> list[PlanNode]:
        unique = _dedup_best(routes)
        unique.sort(key=lambda r: (-r.score, str(r.signature)))
        return unique[: self.config.beam_width]

    def _expand_matches(
        self,
        ctx: AnchorContext,
        want: ValueKind,
        available: tuple,
        depth: int,
        matches: list[SpanMatch],
    ) -> list[PlanNode]:
        out = []
        for mi in available:
            m = matches[mi]
            spec = self.registry.get(m.fn_id)
            compatible = want.kind == spec.output.kind or (
                want.kind == "series" and spec.output.kind == "geo_series"
            )
            if not compatible:
                continue
            # one token carries one intent: consuming this match retires
            # every other reading of the same token
            remaining = tuple(
                x for x in available if matches[x].token_index != m.token_index
            )
            for node in self._expand_one(ctx, m, spec, remaining, depth + 1, matches, want):
                if want.accepts(node.output):
                    out.append(node)
        return out

    def _expand_one(
        self,
        ctx: AnchorContext,
        m: SpanMatch,
        spec: FunctionSpec,
        available: tuple,
        depth: int,
        matches: list[SpanMatch],
        want: ValueKind | None = None,
    ) -> list[PlanNode]:
        if depth > self.config.max_depth:
            return []
        handler = {
            "scan": self._expand_scan,
            "filter": self._expand_nothing,
            "project": self._expand_project,
            "aggregate": self._expand_aggregate,
            "group_aggregate": self._expand_group,
            "top_k": self._expand_top_k,
            "lookup": self._expand_lookup,
            "compare": self._expand_compare,
            "forecast": self._expand_forecast,
            "detect_anomalies": self._expand_anomalies,
        }.get(spec.id, self._expand_generic)
        return handler(ctx, m, spec, available, depth, matches, want)

    def _expand_nothing(self, ctx, m, spec, available, depth, matches, want=None):
        return []

    def _expand_scan(self, ctx, m, spec, available, depth, matches, want=None):
        base = self._base_chain(ctx)
        return [
            PlanNode(
                base.function,
                base.params,
                base.inputs,
                m.score,
                base.consumed | {m.token_index},
                base.output,
            )
        ]

    def _expand_project(self, ctx, m, spec, available, depth, matches, want=None):
        out = []
        unpinned = self._unpinned_label_columns(ctx)
        label = unpinned[0] if len(unpinned) == 1 else None
        if len(unpinned) > 1:
            return []
        for column, tokens in ctx.projections:
            node = self._project_chain(ctx, column, tokens | {m.token_index}, label)
            out.append(
                PlanNode(node.function, node.params, node.inputs, m.score, node.consumed, node.output)
            )
        return out

    def _expand_aggregate(self, ctx, m, spec, available, depth, matches, want=None):
        fn = dict(m.params).get("fn", "mean")
        consumed = {m.token_index}
        if fn == "count":
            # "how many <numerical column>" asks for the amount (sum), while
            # "how many <states/years>" counts entries of that column
            near_anchor = self._column_anchor_obj_near(m.token_index)
            if near_anchor is not None:
                consumed.update(near_anchor.token_range)
                if self.dataset.column(near_anchor.column).semantic_type == "numerical":
                    fn = "sum"
        out = []
        for series in self._routes_for(ctx, ValueKind("series"), available, depth, matches):
            if "question" in series.tags:
                # "which state ..." demands an answer that keeps the labels
                continue
            out.append(
                PlanNode(
                    "aggregate",
                    _pt(fn=fn),
                    (series,),
                    m.score,
                    frozenset(consumed),
                    ValueKind("scalar"),
                )
            )
        return out

    def _column_anchor_obj_near(self, token_index: int, window: int = 2):
        best = None
        for a in self._phrase.anchors:
            if a.kind != "column":
                continue
            if a.first > token_index:
                dist = a.first - token_index
            elif a.last < token_index:
                dist = token_index - a.last
            else:
                dist = 0
            if dist <= window and (best is None or dist < best[0]):
                best = (dist, a)
        return best[1] if best else None

    def _expand_group(self, ctx, m, spec, available, depth, matches, want=None):
        fn = dict(m.params).get("fn")
        values = ctx.projections or (
            [(self._default_value_column(), frozenset())]
            if self._default_value_column()
            else []
        )
        keys: list[tuple[str, frozenset, bool, bool]] = list(ctx.group_keys)
        if not keys and want is not None:
            # no anchored group key: a consumer slot justifies picking the
            # preferred unpinned label column (hint-constrained if any)
            for col in self._unpinned_label_columns(ctx):
                if want.element_hint is None or self._label_kind(col) == want.element_hint:
                    keys = [(col, frozenset(), True, False)]
                    break
        out = []
        for key, ktoks, marked, question in keys:
            for value, vtoks in values:
                out.append(
                    self._group_chain(
                        ctx,
                        key,
                        value,
                        fn or self._default_agg(value),
                        ktoks | vtoks | {m.token_index},
                        m.score if marked else m.score - 0.05,
                        tags=frozenset({"question"}) if question else frozenset(),
                    )
                )
        return out

    def _expand_top_k(self, ctx, m, spec, available, depth, matches, want=None):
        direction = dict(m.params).get("direction", "top")
        k, k_tokens = 1, frozenset()
        integers = [
            (n, first, toks)
            for n, first, toks in ctx.numerics
            if float(n).is_integer() and n >= 1
        ]
        for number, first, toks in integers:
            if abs(first - m.token_index) <= 2:
                k, k_tokens = int(number), toks
                break
        else:
            if len(integers) == 1:
                k, k_tokens = int(integers[0][0]), integers[0][2]
        out = []
        for series in self._routes_for(ctx, ValueKind("series"), available, depth, matches):
            out.append(
                PlanNode(
                    "top_k",
                    _pt(k=k, direction=direction),
                    (series,),
                    m.score,
                    frozenset({m.token_index}) | k_tokens,
                    series.output,
                )
            )
        return out

    def _expand_lookup(self, ctx, m, spec, available, depth, matches, want=None):
        columns = [(c, t) for c, t, _, _ in ctx.group_keys] or [
            (c, frozenset()) for c, _ in ctx.projections
        ]
        out = []
        for column, tokens in columns:
            out.append(
                PlanNode(
                    "lookup",
                    _pt(column=column),
                    (self._base_chain(ctx),),
                    m.score,
                    tokens | {m.token_index},
                    ValueKind("text"),
                )
            )
        return out

    def _expand_compare(self, ctx, m, spec, available, depth, matches, want=None):
        pair = self._compare_pair(ctx)
        if pair is None:
            return []
        fa, fb, drop, swap = pair
        # "change" over two points in time always reads later minus earlier
        if (
            m.term in ("change", "changed")
            and isinstance(fa.literal, int)
            and isinstance(fb.literal, int)
        ):
            swap = fa.literal < fb.literal
        base = ctx.without_filters(drop)
        ctx_a = base.with_filter(fa)
        ctx_b = base.with_filter(fb)
        if swap:
            ctx_a, ctx_b = ctx_b, ctx_a
        left_routes = self._routes_for(ctx_a, ValueKind("scalar"), available, depth, matches)
        right_routes = self._routes_for(ctx_b, ValueKind("scalar"), available, depth, matches)
        out = []
        for left, right in product(left_routes[:2], right_routes[:2]):
            out.append(
                PlanNode(
                    "compare",
                    (),
                    (left, right),
                    m.score,
                    frozenset({m.token_index}),
                    ValueKind("scalar"),
                )
            )
        return out

    def _compare_pair(self, ctx: AnchorContext):
        """Two same-column bindings to contrast, honoring 'from X to Y' order.

        Returns (first, second, filters_to_drop, swap); an in-filter over two
        values splits into its members.
        """
        by_column: dict[str, list[tuple[FilterPlan, list[FilterPlan]]]] = {}
        for f in ctx.filters:
            if f.op == "=":
                by_column.setdefault(f.column, []).append((f, [f]))
            elif f.op == "in" and len(f.literal) == 2:
                fa = FilterPlan(f.column, "=", f.literal[0], f.tokens, f.order)
                fb = FilterPlan(f.column, "=", f.literal[1], frozenset(), f.order)
                by_column.setdefault(f.column, []).extend([(fa, [f]), (fb, [f])])
        for column, entries in by_column.items():
            if len(entries) >= 2:
                (fa, drop_a), (fb, drop_b) = entries[0], entries[1]
                drop = drop_a + [f for f in drop_b if f not in drop_a]
                return fa, fb, drop, self._from_to_swap(fa)
        return None

    def _from_to_swap(self, first: FilterPlan) -> bool:
        """'change from X to Y' reads as Y - X, so the operands swap."""
        if not first.tokens:
            return False
        start = min(first.tokens)
        tokens = self._phrase.tokens
        for j in (start - 1, start - 2):
            if 0 <= j < len(tokens) and tokens[j].lemma == "from":
                return True
        return False

    def _expand_forecast(self, ctx, m, spec, available, depth, matches, want=None):
        horizon, h_tokens = 1, frozenset()
        if ctx.future is not None:
            horizon, h_tokens = ctx.future
        out = []
        want = ValueKind("series", "temporal")
        for series in self._routes_for(ctx, want, available, depth, matches):
            out.append(
                PlanNode(
                    "forecast",
                    _pt(horizon=horizon),
                    (series,),
                    m.score,
                    frozenset({m.token_index}) | h_tokens,
                    ValueKind("forecast"),
                )
            )
        return out

    def _expand_anomalies(self, ctx, m, spec, available, depth, matches, want=None):
        threshold, t_tokens = None, frozenset()
        # explicit "threshold X" / "X sigma(s)" pattern
        for number, first, toks in ctx.numerics:
            neighborhood = self._phrase.tokens[max(0, first - 2) : first]
            trailing = self._phrase.tokens[first + 1 : first + 2]
            lemmas = [t.lemma for t in neighborhood] + [t.lemma for t in trailing]
            if "threshold" in lemmas or "sigma" in lemmas or "sigmas" in lemmas:
                threshold, t_tokens = float(number), toks
                extra = {
                    i
                    for i in range(max(0, first - 2), min(len(self._phrase.tokens), first + 2))
                    if self._phrase.tokens[i].lemma in ("threshold", "sigma", "sigmas")
                }
                t_tokens = t_tokens | frozenset(extra)
                break
        if threshold is None:
            threshold = self.config.anomaly_threshold
        params = _pt(threshold=threshold)
        out = []
        for series in self._routes_for(ctx, ValueKind("series"), available, depth, matches):
            out.append(
                PlanNode(
                    "detect_anomalies",
                    params,
                    (series,),
                    m.score,
                    frozenset({m.token_index}) | t_tokens,
                    ValueKind("anomaly_report"),
                )
            )
        return out

    def _expand_generic(self, ctx, m, spec, available, depth, matches, want=None):
        """Manifest-added functions: fill typed slots, defaults for params."""
        slot_options = []
        for slot in spec.inputs:
            routes = self._routes_for(ctx, slot.kind, available, depth, matches)
            if not routes and slot.required:
                return []
            slot_options.append(routes[:2] if routes else [None])
        params = _pt(**{p.name: p.default for p in spec.params})
        out = []
        for combo in product(*slot_options):
            inputs = tuple(c for c in combo if c is not None)
            out.append(
                PlanNode(
                    spec.id,
                    params,
                    inputs,
                    m.score,
                    frozenset({m.token_index}),
                    spec.output,
                )
            )
        return out

    # ------------------------------------------------------------------
    # candidate enumeration + finalize
    # ------------------------------------------------------------------

    def build(self, phrase: PhraseStructure) -> list[OperationGraph]:
        self._phrase = phrase
        ctx, blocked = self._lower_anchors(phrase)
        matches = self._match_spans(phrase, blocked)
        has_anchors = bool(
            ctx.filters or ctx.projections or ctx.group_keys or ctx.table_tokens or ctx.future
        )
        if not has_anchors and not matches:
            diagnostics = self._diagnostics(phrase)
            raise UnintelligibleRequestError(
                "request matched no data references and no operations", diagnostics
            )

        sinks: list[PlanNode] = []
        all_idx = tuple(range(len(matches)))
        for mi in all_idx:
            m = matches[mi]
            spec = self.registry.get(m.fn_id)
            remaining = tuple(
                x for x in all_idx if matches[x].token_index != m.token_index
            )
            sinks.extend(self._expand_one(ctx, m, spec, remaining, 1, matches))

        sinks.extend(self._data_route_sinks(ctx))

        # wrap temporal series sinks in a forecast node when the phrase
        # pointed at the future and nothing consumed that anchor yet
        if ctx.future is not None:
            horizon, h_tokens = ctx.future
            for s in list(sinks):
                if (
                    s.output.kind == "series"
                    and s.output.element_hint == "temporal"
                    and not (h_tokens & s.all_consumed())
                ):
                    sinks.append(
                        PlanNode(
                            "forecast",
                            _pt(horizon=horizon),
                            (s,),
                            1.0,
                            h_tokens,
                            ValueKind("forecast"),
                        )
                    )

        graphs = [self._finalize(s, phrase) for s in _dedup_best(sinks)]
        if not graphs:
            raise UnintelligibleRequestError(
                "no operation graph could be constructed", self._diagnostics(phrase)
            )
        ranked = rank(graphs)
        return ranked[: self.config.max_candidates]

    def _data_route_sinks(self, ctx: AnchorContext) -> list[PlanNode]:
        sinks: list[PlanNode] = []
        unpinned = self._unpinned_label_columns(ctx)
        for column, tokens in ctx.projections:
            if not unpinned:
                inner = self._project_chain(ctx, column, tokens, None)
                sinks.append(
                    PlanNode(
                        "aggregate", _pt(fn="mean"), (inner,), 1.0, frozenset(), ValueKind("scalar")
                    )
                )
            elif len(unpinned) == 1:
                sinks.append(self._project_chain(ctx, column, tokens, unpinned[0]))
            else:
                sinks.append(
                    self._group_chain(ctx, unpinned[0], column, self._default_agg(column), tokens)
                )
            for gkey, gtoks, marked, question in ctx.group_keys:
                sinks.append(
                    self._group_chain(
                        ctx, gkey, column, self._default_agg(column), tokens | gtoks,
                        score=1.0 if marked else 0.95,
                        tags=frozenset({"question"}) if question else frozenset(),
                    )
                )
        if not ctx.projections:
            value = self._default_value_column()
            for gkey, gtoks, marked, question in ctx.group_keys:
                if value is not None:
                    sinks.append(
                        self._group_chain(
                            ctx, gkey, value, self._default_agg(value), gtoks,
                            score=1.0 if marked else 0.95,
                            tags=frozenset({"question"}) if question else frozenset(),
                        )
                    )
        sinks.append(self._base_chain(ctx))
        return sinks

    def _diagnostics(self, phrase: PhraseStructure) -> dict:
        best: dict[str, float] = {}
        for span in phrase.content_spans:
            for lemma in span.lemmas:
                for spec in self.registry.functions:
                    m = match_term(lemma, spec, self.embeddings, 0.0)
                    if m is not None and m.score > best.get(spec.id, 0.0):
                        best[spec.id] = round(m.score, 4)
        return {
            "tokens": [t.lemma for t in phrase.tokens],
            "best_scores": dict(sorted(best.items(), key=lambda kv: -kv[1])[:5]),
            "anchors": len(phrase.anchors),
        }

    def _finalize(self, sink: PlanNode, phrase: PhraseStructure) -> OperationGraph:
        # merge shared subtrees so repeated chains become one node
        nodes: list[tuple[PlanNode, str]] = []
        by_sig: dict[tuple, str] = {}
        edges: list[tuple[str, str, int]] = []

        def visit(n: PlanNode) -> str:
            if n.signature in by_sig:
                return by_sig[n.signature]
            child_ids = [visit(c) for c in n.inputs]
            node_id = f"n{len(nodes)}_{n.function}"
            by_sig[n.signature] = node_id
            nodes.append((n, node_id))
            for slot, cid in enumerate(child_ids):
                edges.append((cid, node_id, slot))
            return node_id

        sink_id = visit(sink)

        op_nodes = []
        id_order = {nid: i for i, (_, nid) in enumerate(nodes)}
        incoming: dict[str, list[str]] = {nid: [] for _, nid in nodes}
        for frm, to, slot in edges:
            incoming[to].append(frm)
        for n, nid in nodes:
            spans = sorted(
                (phrase.tokens[i].start, phrase.tokens[i].end)
                for i in n.consumed
                if i < len(phrase.tokens)
            )
            op_nodes.append(
                OperationNode(
                    id=nid,
                    function=n.function,
                    bound_params=_params_dict(n.params),
                    input_edges=incoming[nid],
                    match_score=n.score,
                    consumed_spans=spans,
                    output_kind=n.output,
                )
            )

        depth_by_id: dict[str, int] = {}
        for n, nid in nodes:  # postorder: children first
            preds = incoming[nid]
            depth_by_id[nid] = 0 if not preds else 1 + max(depth_by_id[p] for p in preds)
        depth = max(depth_by_id.values()) if depth_by_id else 0

        consumed = sink.all_consumed()
        meaningful = set(phrase.content_token_indices()) | phrase.anchor_token_indices()
        coverage = (
            len(consumed & meaningful) / len(meaningful) if meaningful else 1.0
        )
        scores = [n.score for n, _ in nodes]
        mean_score = sum(scores) / len(scores)
        relevance = mean_score * coverage
        functions = {n.function for n, _ in nodes}
        complete = bool(functions - {"scan", "filter"}) or phrase.modality_hint is not None

        return OperationGraph(
            nodes=op_nodes,
            edges=edges,
            sink=sink_id,
            depth=depth,
            relevance=relevance,
            complete=complete,
            coverage=coverage,
        )


def rank(candidates: list[OperationGraph]) -> list[OperationGraph]:
    completes = [g for g in candidates if g.complete]
    partials = [g for g in candidates if not g.complete]
    completes.sort(key=lambda g: (-g.relevance, len(g.nodes), tuple(n.id for n in g.nodes), g.signature))
    partials.sort(key=lambda g: (-g.depth, -g.relevance, tuple(n.id for n in g.nodes), g.signature))
    return completes + partials


def select(candidates: list[OperationGraph]) -> OperationGraph:
    """Pick the graph to execute: complete graphs first, then the policy.

    Among complete graphs relevance wins, ties go to fewer nodes, then to
    the lexicographically smallest node-id sequence. With no complete graph,
    the greatest depth wins, then relevance.
    """
    if not candidates:
        raise BuilderError("empty candidate list")
    return rank(candidates)[0]


def build(
    phrase: PhraseStructure,
    registry: Registry,
    dataset: Dataset,
    config: BuilderConfig | None = None,
    embeddings: EmbeddingStore | None = None,
) -> list[OperationGraph]:
    """Compile a phrase into a ranked candidate list of operation graphs."""
    return GraphBuilder(registry, dataset, embeddings, config).build(phrase)


# ----------------------------------------------------------------------
# wire format
# ----------------------------------------------------------------------


def to_wire(graph: OperationGraph) -> dict:
    return {
        "nodes": [
            {
                "id": n.id,
                "function": n.function,
                "params": {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(n.bound_params.items())},
                "score": round(n.match_score, 6),
            }
            for n in graph.nodes
        ],
        "edges": [{"from": f, "to": t, "slot": s} for f, t, s in graph.edges],
        "sink": graph.sink,
        "depth": graph.depth,
        "relevance": round(graph.relevance, 6),
        "complete": graph.complete,
    }


def to_wire_json(graph: OperationGraph) -> str:
    return json.dumps(to_wire(graph), sort_keys=True, separators=(",", ":"))


def from_wire(doc: dict, registry: Registry, dataset: Dataset) -> OperationGraph:
    """Rebuild an OperationGraph (with resolved kinds) from its document."""
    incoming: dict[str, list[tuple[int, str]]] = {n["id"]: [] for n in doc["nodes"]}
    for e in doc["edges"]:
        incoming[e["to"]].append((e["slot"], e["from"]))
    nodes: list[OperationNode] = []
    kind_by_id: dict[str, ValueKind] = {}

    remaining = {n["id"]: n for n in doc["nodes"]}
    ordered: list[dict] = []
    while remaining:
        progressed = False
        for nid in list(remaining):
            if all(frm in kind_by_id for _, frm in incoming[nid]):
                raw = remaining.pop(nid)
                ordered.append(raw)
                input_ids = [frm for _, frm in sorted(incoming[nid])]
                kind_by_id[nid] = resolve_output_kind(
                    raw["function"], raw["params"], [kind_by_id[i] for i in input_ids], dataset, registry
                )
                progressed = True
        if not progressed:
            raise BuilderError("graph document contains a cycle")

    for raw in ordered:
        nid = raw["id"]
        input_ids = [frm for _, frm in sorted(incoming[nid])]
        nodes.append(
            OperationNode(
                id=nid,
                function=raw["function"],
                bound_params=dict(raw["params"]),
                input_edges=input_ids,
                match_score=raw["score"],
                consumed_spans=[],
                output_kind=kind_by_id[nid],
            )
        )
    return OperationGraph(
        nodes=nodes,
        edges=[(e["from"], e["to"], e["slot"]) for e in doc["edges"]],
        sink=doc["sink"],
        depth=doc["depth"],
        relevance=doc["relevance"],
        complete=doc["complete"],
    )


def resolve_output_kind(
    function: str,
    params: dict,
    input_kinds: list[ValueKind],
    dataset: Dataset,
    registry: Registry | None = None,
) -> ValueKind:
    def label_kind(column):
        if column is None:
            return "numerical"
        return dataset.column(column).semantic_type

    if function in ("scan", "filter"):
        return ValueKind("table")
    if function == "project":
        return ValueKind("series", label_kind(params.get("label_column")))
    if function == "group_aggregate":
        return ValueKind("series", label_kind(params.get("key_column")))
    if function == "top_k":
        return input_kinds[0]
    if function in ("aggregate", "compare"):
        return ValueKind("scalar")
    if function == "lookup":
        return ValueKind("text")
    if function == "forecast":
        return ValueKind("forecast")
    if function == "detect_anomalies":
        return ValueKind("anomaly_report")
    if registry is not None and function in registry:
        return registry.get(function).output
    raise BuilderError(f"unknown function {function!r}")


def validate(graph: OperationGraph, registry: Registry, dataset: Dataset) -> list[str]:
    """Structural checks: acyclicity, single sink, typed edges. Returns violations."""
    problems = []
    ids = [n.id for n in graph.nodes]
    if len(set(ids)) != len(ids):
        problems.append("duplicate node ids")
    by_id = {n.id: n for n in graph.nodes}

    indegree = {nid: 0 for nid in ids}
    outdegree = {nid: 0 for nid in ids}
    for frm, to, _ in graph.edges:
        if frm not in by_id or to not in by_id:
            problems.append(f"edge references unknown node {frm}->{to}")
            continue
        indegree[to] += 1
        outdegree[frm] += 1

    sinks = [nid for nid in ids if outdegree[nid] == 0]
    if sinks != [graph.sink]:
        problems.append(f"expected exactly one sink {graph.sink}, found {sinks}")

    # Kahn's algorithm for acyclicity
    pending = dict(indegree)
    adjacency: dict[str, list[str]] = {nid: [] for nid in ids}
    for frm, to, _ in graph.edges:
        adjacency[frm].append(to)
    queue = [nid for nid in ids if pending[nid] == 0]
    seen = 0
    while queue:
        nid = queue.pop()
        seen += 1
        for nxt in adjacency[nid]:
            pending[nxt] -= 1
            if pending[nxt] == 0:
                queue.append(nxt)
    if seen != len(ids):
        problems.append("graph contains a cycle")

    for frm, to, slot in graph.edges:
        if frm not in by_id or to not in by_id:
            continue
        consumer = by_id[to]
        spec = registry.get(consumer.function) if consumer.function in registry else None
        if spec is None or slot >= len(spec.inputs):
            continue
        slot_kind = spec.inputs[slot].kind
        producer_kind = by_id[frm].output_kind
        if not slot_kind.accepts(producer_kind):
            problems.append(
                f"edge {frm}->{to} slot {slot}: {producer_kind} does not fit {slot_kind}"
            )
    return problems
