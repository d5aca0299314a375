#pragma once

#include <map>
#include <string>
#include <string_view>

// Prompt texts used by the gateway, the agent and the evaluator. The wording
// is part of the benchmark protocol; edit only together with the version tags.
namespace mcpgw::prompts {

inline constexpr std::string_view kCopilotSystem =
    "You are an agent designed to assist users with daily tasks by using external tools. You have "
    "access to two tools: a retrieval tool and an execution tool. The retrieval tool allows you to "
    "search a large toolset for relevant tools, and the execution tool lets you invoke the tools "
    "you retrieved. Whenever possible, you should use these tools to get accurate, up-to-date "
    "information and to perform file operations.\n"
    "\n"
    "Note that you can only response to user once, so you should try to provide a complete answer "
    "in your response.";

inline constexpr std::string_view kRouteToolDescription =
    "This is a tool used to find MCP servers and tools that can solve user needs\n"
    "When to use this tool:\n"
    "    -When faced with user needs, you (LLM) are unable to solve them on your own and do not "
    "have the tools to solve the problem.\n"
    "    -When a user proposes a new task and you (LLM) are unsure which specific tool to use to "
    "complete it.\n"
    "    -When the user's request is vague or complex, and feasible tool options need to be "
    "explored first.\n"
    "    -This is the first step in executing unknown tasks, known as the \"discovery\" phase, "
    "aimed at finding the correct tool.\n"
    "**Parameter Description**\n"
    "Query (string, required): The input query must contain a <tool_assistant> tag with server "
    "and tool descriptions, for example:\n"
    "<tool_assistant>\n"
    "server: ... # Platform/permission domain\n"
    "tool: ... # Operation type + target\n"
    "</tool_assistant>";

inline constexpr std::string_view kExecuteToolDescription =
    "A tool for executing a specific tool on a specific server.Select tools only from the results "
    "obtained from the previous route each time.\n"
    "When to use this tool:\n"
    "    - When using the route tool to route to a specific MCP server and tool\n"
    "    - When the 'execute-tool' fails to execute (up to 3 repetitions).\n"
    "    - When the user's needs and previous needs require the same tool.\n"
    "Parameters explained:\n"
    "    -server_name: string, required. The name of the server where the target tool is "
    "located.\n"
    "    -tool_name: string, required. The name of the target tool to be executed.\n"
    "    -params: dictionary or None, optional. A dictionary containing all parameters that need "
    "to be passed to the target tool. This can be omitted if the target tool does not require "
    "parameters.";

inline constexpr std::string_view kServerSummaryVersion = "server-summary/v1";

inline constexpr std::string_view kServerSummary =
    "You are an expert AI technical writer. Based on the following information about an MCP "
    "server, please generate a concise and accurate summary of its core purpose and "
    "capabilities.\n"
    "\n"
    "**Server Name:** {server_name}\n"
    "\n"
    "**Server Description:** {server_desc}\n"
    "\n"
    "**Available Tools:** {tool_descriptions}\n"
    "\n"
    "Please return only the generated summary text, without any additional titles or preambles.";

inline constexpr std::string_view kEvaluationSystem =
    "You are an expert in evaluating the performance of a tool-use agent. The agent is designed to "
    "help a human user use multi-tools to complete a task. Given the user's task, the agent's "
    "final response, key points for task completion, and tool call history, your goal is to "
    "determine whether the agent has completed the task and achieved all requirements.\n"
    "\n"
    "Your response must strictly follow the following evaluation criteria!\n"
    "\n"
    "*Important Evaluation Criteria*:\n"
    "\n"
    "1. You must carefully check whether the information (e.g. the coordinates of the addresses) "
    "comes from the tool call, if the agent get it from the internal knowledge, it should be "
    "considered failed.\n"
    "\n"
    "2: Some tasks require to create files to be considered successful.\n"
    "\n"
    "*IMPORTANT*\n"
    "\n"
    "Format your response into two lines as shown below:\n"
    "\n"
    "Thoughts: <your thoughts and reasoning process based on double-checking each key points and "
    "the evaluation criteria>\n"
    "\n"
    "Status: \"success\" or \"failure\"";

inline constexpr std::string_view kEvaluationUser =
    "User Task: {task}\n"
    "\n"
    "Key Points: {key_points}\n"
    "\n"
    "Final Response: {response}\n"
    "\n"
    "Tool Call History: {tool_calls}\n"
    "\n"
    "Tool Descriptions: {tool_descriptions}";

inline constexpr std::string_view kKeyPointsSystem =
    "You are an expert tasked with analyzing a given task to identify the key points explicitly "
    "stated in the task description.\n"
    "\n"
    "**Objective**: Carefully analyze the task description and extract the critical elements "
    "explicitly mentioned in the task for achieving its goal.\n"
    "\n"
    "**Instructions**:\n"
    "\n"
    "1. Read the task description carefully.\n"
    "\n"
    "2. Identify and extract **key points** directly stated in the task description.\n"
    "\n"
    "   - A **key point** is a critical element, condition, or step explicitly mentioned in the "
    "task description.\n"
    "\n"
    "   - Do not infer or add any unstated elements.\n"
    "\n"
    "**Respond with**:\n"
    "\n"
    "- **Key Points**: A numbered list of the explicit key points for completing this task, one "
    "per line, without explanations or additional details.";

/// Replaces `{name}` placeholders in a single left-to-right pass. Unknown
/// placeholders and all other braces are copied through untouched, and
/// substituted values are never rescanned.
std::string fill(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& values);

}  // namespace mcpgw::prompts
