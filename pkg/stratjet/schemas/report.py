from marshmallow import ValidationError, fields, post_load, validate

from . import BaseSchema
from ..errors import EngineError
from ..models.jet import MODES
from ..models.report import CHECKS, STATUSES, CheckRecord, Report, SuiteConfig


class CheckRecordSchema(BaseSchema):
    """Schema for one check record"""
    check = fields.String(required=True)
    params = fields.Dict(keys=fields.String(), load_default=dict)
    status = fields.String(required=True, validate=validate.OneOf(STATUSES))
    details = fields.Dict(keys=fields.String(), load_default=dict)
    wall_time = fields.Float(load_default=0.0)
    expected_fail = fields.Boolean(load_default=False)

    @post_load
    def make_record(self, data, **kwargs):
        return CheckRecord(**data)


class ReportSchema(BaseSchema):
    """Schema for suite reports; the run id stays in the logs"""
    schema_version = fields.String(required=True)
    config = fields.Dict(keys=fields.String(), load_default=dict)
    summary = fields.Method('get_summary', dump_only=True)
    exit_code = fields.Method('get_exit_code', dump_only=True)
    records = fields.List(fields.Nested(CheckRecordSchema), load_default=list)

    class Meta(BaseSchema.Meta):
        ordered = True

    def get_summary(self, obj):
        return obj.summary()

    def get_exit_code(self, obj):
        return obj.exit_code

    @post_load
    def make_report(self, data, **kwargs):
        return Report(**data)


class SuiteConfigSchema(BaseSchema):
    """Schema for suite configuration files"""
    characteristic = fields.Integer(data_key='char', load_default=0)
    mode = fields.String(load_default='plain', validate=validate.OneOf(MODES))
    dims = fields.List(fields.Integer(validate=validate.Range(min=1, max=3)), load_default=lambda: [1, 2])
    levels = fields.List(fields.Integer(validate=validate.Range(min=0)), load_default=lambda: [0, 1, 2, 3])
    degree_bounds = fields.List(fields.Integer(validate=validate.Range(min=0)), load_default=lambda: [0, 1, 2])
    checks = fields.List(fields.String(validate=validate.OneOf(CHECKS)), load_default=lambda: list(CHECKS))
    fixtures = fields.List(fields.String(), load_default=list)
    out = fields.String(load_default=None, allow_none=True)
    expect_fail = fields.List(fields.String(validate=validate.OneOf(CHECKS)), load_default=list)
    workers = fields.Integer(load_default=1, validate=validate.Range(min=1))
    use_catalog = fields.Boolean(load_default=True)
    seed = fields.Integer(load_default=1729)

    @post_load
    def make_config(self, data, **kwargs):
        try:
            return SuiteConfig(**{k: tuple(v) if isinstance(v, list) else v for k, v in data.items()})
        except EngineError as e:
            raise ValidationError(e.message)


check_record_schema = CheckRecordSchema()
report_schema = ReportSchema()
suite_config_schema = SuiteConfigSchema()
