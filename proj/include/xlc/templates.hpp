#pragma once

// Prompt template text. Any edit here must come with a bump of
// kTemplateVersion (xlc/hash.hpp) and regenerated golden fixtures.

#include <string_view>

namespace xlc::templates {

// Service-description summarization
inline constexpr std::string_view kServiceSummaryRole =
    "I want you to act as an expert software engineer. Consider the service descriptions.";
inline constexpr std::string_view kServiceSummaryTask = "Your task is to summarize these service descriptions.";
inline constexpr std::string_view kServiceSummaryFocus =
    "Focus on the following aspects of the service functionality:\n"
    "* The functionality provided by the service\n"
    "* References to resources it operates\n"
    "* Distinguishing features of the service that clearly explains its operation";
inline constexpr std::string_view kServiceSummaryConstraint =
    "Your summary should be at most 2-3 sentences and should be in third person.";

// Incident field summarization (our own wording)
inline constexpr std::string_view kIncidentSummaryRole =
    "You are an expert on-call engineer preparing incident records for root cause analysis.";
inline constexpr std::string_view kIncidentSummaryTaskPrefix = "Summarize the following incident ";
inline constexpr std::string_view kIncidentSummaryRules =
    "Write a concise summary of at most 3 sentences.\n"
    "Preserve error codes, service names, component names and resource identifiers exactly as written.\n"
    "Do not add information that is not present in the text.\n"
    "Return only the summary text.";

// Root-cause prompt
inline constexpr std::string_view kRcaTaskHeading = "-- Task Description:";
inline constexpr std::string_view kRcaTaskRole =
    "- You are dealing with root cause analysis for Azure cloud incident. You are an **on-call engineer** that is "
    "responsible for investigating the root cause.";
inline constexpr std::string_view kRcaTaskInputs =
    "- You will be provided with title and summary of the incident along with the service name and its "
    "functionality that affected by the incident.";
inline constexpr std::string_view kRcaTaskUpstreamIntro =
    "- You will also be provided with a list of ** Upstream service dependencies** and their **Descriptions**";
inline constexpr std::string_view kRcaTaskUpstreamDefinition =
    "- In the context of software engineering and system architecture, an upstream service dependency denotes a "
    "relationship between two services, where one service (the dependent service) relies on another service (the "
    "dependency) to fulfill its operational requirements. This dependency typically involves the exchange of data, "
    "execution of functions, or access to resources necessary for the dependent service to perform its intended "
    "tasks. This relationship is termed \"upstream\" to signify the flow of dependencies from the dependent service "
    "to its sources, akin to the flow of a river from its upstream source.";
inline constexpr std::string_view kRcaTaskUpstreamPurpose =
    "- The Upstream service dependencies have been provided so that you can better identify the root cause of the "
    "incident.";

inline constexpr std::string_view kRcaExamplesHeading = "-- Historical Incident Examples:";
inline constexpr std::string_view kRcaExamplesIntro =
    "- Below are some historical incidents with their root causes. If you find the description and title to be "
    "**similar or relevant** to the current incident, you can also use the examples to determine the root cause of "
    "the current incident.";

inline constexpr std::string_view kRcaAnswerHeading =
    "-- Answering Format: Your output response should strictly be a **Json** file with the following two "
    "objectives:";
inline constexpr std::string_view kRcaObjective1 =
    "Objective1: Infer and explain in detail, the Root cause that could have caused the incident";
inline constexpr std::string_view kRcaObjective2 =
    "Objective2: Binary classification as follows: If and only if you identify the root cause as an upstream "
    "service dependency, return \"Yes\". Else, if the incident is **not** caused due to the failure of an upstream "
    "service, return \"No\"";

inline constexpr std::string_view kRcaDetailsHeading = "-- Incident Details:";
inline constexpr std::string_view kRcaUpstreamHeading = "-- Upstream Service Dependencies:";
inline constexpr std::string_view kRcaNoUpstream = "No known upstream dependencies.";
/// Separator between an upstream name and its description (U+2013).
inline constexpr std::string_view kRcaUpstreamSeparator = " – ";

// Monitor prompt
inline constexpr std::string_view kMonitorTaskHeading = "-- Task Description:";
inline constexpr std::string_view kMonitorRolePrefix =
    "- You are an intelligent virtual assistant that answers questions from a user based on the monitor metadata "
    "provided. Go through monitor metadata {'Monitor Name', 'Metric Name', 'Service Name', 'Alert Title', "
    "'Alert Conditions'} , preprocess the text such as camel casing, snake case splitting, etc. and predict the ";
inline constexpr std::string_view kMonitorRoleSuffix =
    " of the monitor. Answer the following questions about the monitor sequentially.";
inline constexpr std::string_view kMonitorQ1Resource =
    "1. Q1: Based on the monitor description, identify the underlying entity being tracked. Pay attention to "
    "features, internal functions, dependencies, datastores, or service level objectives.";
inline constexpr std::string_view kMonitorQ1Slo =
    "1. Q1: Based on the monitor description, identify the service level objective being tracked. Pay attention to "
    "features, internal functions, dependencies, datastores, or service level objectives.";
inline constexpr std::string_view kMonitorQ2 = "2. Q2: Categorize the identified entity into a generic class:";
inline constexpr std::string_view kMonitorGuidance =
    "-- Additional Guidance :\n"
    "- Focus on extracting relevant information from the descriptions.\n"
    "- Pay attention to specific features or characteristics indicative of the resource class.\n"
    "- Consider negations or exceptions in descriptions.\n"
    "- Highlight the importance of understanding relationships between different elements.";
inline constexpr std::string_view kMonitorMetadataHeading = "-- Monitor Metadata:";
inline constexpr std::string_view kMonitorServiceHeading = "-- Service Description:";
inline constexpr std::string_view kMonitorComponentsHeading = "-- Component Descriptions:";
inline constexpr std::string_view kMonitorNoServiceDescription = "No service description was provided.";
inline constexpr std::string_view kMonitorNoComponents = "No component descriptions were provided.";

}  // namespace xlc::templates
