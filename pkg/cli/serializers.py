from rest_framework import serializers

from datasets.services import DatasetStats
from strategies.models import PassMode, Variant
from strategies.reports import LevelResult, PhaseReport, RunReport

SCHEMA_VERSION = 1


class DatasetStatsSerializer(serializers.Serializer):
    n = serializers.IntegerField(min_value=0)
    item_count = serializers.IntegerField(min_value=0)
    avg_width = serializers.FloatField(min_value=0)


class CountersSerializer(serializers.Serializer):
    candidate_count = serializers.IntegerField(min_value=0)
    joins = serializers.IntegerField(min_value=0)
    prune_checks = serializers.IntegerField(min_value=0)
    pruned = serializers.IntegerField(min_value=0)
    subset_node_visits = serializers.IntegerField(min_value=0)
    emitted_pairs = serializers.IntegerField(min_value=0)


class PhaseSerializer(serializers.Serializer):
    first_pass = serializers.IntegerField(min_value=1)
    npass = serializers.IntegerField(min_value=1)
    modes = serializers.ListField(child=serializers.ChoiceField(choices=PassMode.choices))
    per_level_candidates = serializers.ListField(child=serializers.IntegerField(min_value=0))
    per_level_prune_checks = serializers.ListField(child=serializers.IntegerField(min_value=0))
    counters = CountersSerializer(source="*")
    elapsed_ticks = serializers.FloatField(source="elapsed", min_value=0)

    def validate(self, attrs):
        npass = attrs["npass"]
        if len(attrs["modes"]) != npass or len(attrs["per_level_candidates"]) != npass:
            raise serializers.ValidationError("modes y per_level_candidates deben tener npass elementos.")
        if attrs["modes"][0] != PassMode.PRUNED:
            raise serializers.ValidationError("La primera pasada de una fase siempre es PRUNED.")
        if sum(attrs["per_level_candidates"]) != attrs["candidate_count"]:
            raise serializers.ValidationError("candidate_count no coincide con la suma por nivel.")
        return attrs


class ItemSerializer(serializers.Serializer):
    itemset = serializers.ListField(child=serializers.IntegerField(min_value=0), min_length=1)
    support = serializers.IntegerField(min_value=0)


class LevelSerializer(serializers.Serializer):
    """
    Los itemsets se escriben con las etiquetas externas del dataset
    (context["labels"]) y sólo con context["emit_itemsets"].
    """
    k = serializers.IntegerField(min_value=1)
    count = serializers.IntegerField(min_value=0)
    items = ItemSerializer(many=True, required=False)

    def to_representation(self, level):
        data = {"k": level.k, "count": level.count}
        if self.context.get("emit_itemsets"):
            labels = self.context.get("labels")
            data["items"] = [
                {
                    "itemset": [labels[i] for i in itemset] if labels is not None else list(itemset),
                    "support": support,
                }
                for itemset, support in sorted(level.supports.items())
            ]
        return data

    def validate(self, attrs):
        items = attrs.get("items")
        if items is not None:
            if len(items) != attrs["count"]:
                raise serializers.ValidationError(f"Nivel {attrs['k']}: count no coincide con items.")
            if any(len(item["itemset"]) != attrs["k"] for item in items):
                raise serializers.ValidationError(f"Nivel {attrs['k']}: itemset de tamaño distinto a k.")
        return attrs


class TotalsSerializer(serializers.Serializer):
    total_elapsed = serializers.FloatField(read_only=True)
    actual_elapsed = serializers.FloatField(min_value=0)
    phase_count = serializers.IntegerField(read_only=True)


class RunReportSerializer(serializers.Serializer):
    """
    Esquema canónico del RunReport en JSON. CSV es sólo una proyección.
    Con context["db"] los itemsets leídos se recodifican a ItemId.
    """
    schema_version = serializers.SerializerMethodField()
    label = serializers.CharField()
    algo = serializers.ChoiceField(source="variant", choices=Variant.choices)
    optimized = serializers.BooleanField()
    dataset = serializers.CharField(allow_blank=True, required=False, default="")
    stats = DatasetStatsSerializer()
    min_sup = serializers.FloatField(min_value=0, max_value=1)
    threshold = serializers.IntegerField(min_value=0)
    config = serializers.DictField()
    phases = PhaseSerializer(many=True)
    levels = LevelSerializer(many=True)
    totals = TotalsSerializer(source="*")

    def get_schema_version(self, obj):
        return SCHEMA_VERSION

    def to_internal_value(self, data):
        version = data.get("schema_version") if isinstance(data, dict) else None
        if version != SCHEMA_VERSION:
            raise serializers.ValidationError({"schema_version": f"Se esperaba {SCHEMA_VERSION}."})
        return super().to_internal_value(data)

    def _itemset(self, labels):
        db = self.context.get("db")
        if db is None:
            return tuple(labels)
        try:
            return db.from_labels(labels)
        except KeyError as exc:
            raise serializers.ValidationError(f"Etiqueta desconocida en el dataset: {exc}.")

    def create(self, validated_data):
        phases = [
            PhaseReport(
                first_pass=p["first_pass"],
                npass=p["npass"],
                per_level_candidates=tuple(p["per_level_candidates"]),
                modes=tuple(p["modes"]),
                per_level_prune_checks=tuple(p["per_level_prune_checks"]),
                candidate_count=p["candidate_count"],
                joins=p["joins"],
                prune_checks=p["prune_checks"],
                pruned=p["pruned"],
                subset_node_visits=p["subset_node_visits"],
                emitted_pairs=p["emitted_pairs"],
                elapsed=p["elapsed"],
            )
            for p in validated_data["phases"]
        ]

        has_itemsets = all("items" in level for level in validated_data["levels"])
        levels = []
        for level in validated_data["levels"]:
            if has_itemsets:
                supports = {self._itemset(item["itemset"]): item["support"] for item in level["items"]}
                levels.append(LevelResult(k=level["k"], supports=supports))
            else:
                levels.append(LevelResult(k=level["k"], supports={}, known_count=level["count"]))

        return RunReport(
            label=validated_data["label"],
            variant=validated_data["variant"],
            optimized=validated_data["optimized"],
            min_sup=validated_data["min_sup"],
            threshold=validated_data["threshold"],
            stats=DatasetStats(**validated_data["stats"]),
            config=dict(validated_data["config"]),
            phases=phases,
            levels=levels,
            actual_elapsed=validated_data["actual_elapsed"],
            dataset=validated_data.get("dataset", ""),
            has_itemsets=has_itemsets,
        )
