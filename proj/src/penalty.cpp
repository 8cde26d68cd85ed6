#include <hdsparse/penalty.hpp>

namespace hdsparse {

PenaltySpec PenaltySpec::l1(double lambda)
{
    PenaltySpec s;
    s.kind = PenaltyKind::L1;
    s.lambda = lambda;
    s.validate();
    return s;
}

PenaltySpec PenaltySpec::scad(double lambda, double a)
{
    PenaltySpec s;
    s.kind = PenaltyKind::SCAD;
    s.lambda = lambda;
    s.a = a;
    s.validate();
    return s;
}

PenaltySpec PenaltySpec::mcp(double lambda, double gamma)
{
    PenaltySpec s;
    s.kind = PenaltyKind::MCP;
    s.lambda = lambda;
    s.gamma = gamma;
    s.validate();
    return s;
}

void PenaltySpec::validate() const
{
    require(std::isfinite(lambda) && lambda >= 0.0, "penalty lambda must be finite and >= 0");
    if (kind == PenaltyKind::SCAD) require(a > 2.0, "SCAD requires a > 2");
    if (kind == PenaltyKind::MCP) require(gamma > 1.0, "MCP requires gamma > 1");
}

double PenaltySpec::lipschitz_h() const
{
    switch (kind) {
    case PenaltyKind::L1: return 0.0;
    case PenaltyKind::SCAD: return 1.0 / (a - 1.0);
    case PenaltyKind::MCP: return 1.0 / gamma;
    }
    return 0.0;
}

std::string to_string(PenaltyKind k)
{
    switch (k) {
    case PenaltyKind::L1: return "l1";
    case PenaltyKind::SCAD: return "scad";
    case PenaltyKind::MCP: return "mcp";
    }
    return "l1";
}

PenaltyKind penalty_kind_from_string(const std::string& s)
{
    if (s == "l1" || s == "lasso" || s == "L1") return PenaltyKind::L1;
    if (s == "scad" || s == "SCAD") return PenaltyKind::SCAD;
    if (s == "mcp" || s == "MCP") return PenaltyKind::MCP;
    throw InvalidArgument("unknown penalty kind '" + s + "'");
}

DCDecomposition decompose(const PenaltySpec& spec, std::vector<Index> skip)
{
    spec.validate();
    DCDecomposition d;
    d.chi = [spec, skip](const VectorXd& b) { return chi_total(spec, b, skip); };
    d.h_value = [spec, skip](const VectorXd& b) { return h_total(spec, b, skip); };
    d.h_grad = [spec, skip](const VectorXd& b) { return h_grad(spec, b, skip); };
    d.lipschitz_h = spec.lipschitz_h();
    return d;
}

} // namespace hdsparse
